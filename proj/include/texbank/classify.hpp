#pragma once

// Diagonal-covariance Gaussian Bayes classifier, leave-one-out
// cross-validation and per-class / total accuracy reporting.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "texbank/error.hpp"
#include "texbank/feature_vector.hpp"

namespace texbank {

struct Sample {
    std::string id;
    FeatureVector features;
    std::string label;
    std::string case_id;
};

/// Samples sharing one feature schema. Classes keep the order in which they
/// were declared (or first seen), which is also the tie-break order.
class LabeledDataset {
public:
    LabeledDataset() = default;

    LabeledDataset(std::vector<Sample> samples, std::vector<std::string> classes = {})
        : samples_(std::move(samples)), classes_(std::move(classes)) {
        if (samples_.empty()) throw InsufficientDataError("dataset has no samples");
        feature_names_ = samples_.front().features.names();
        if (classes_.empty()) {
            for (const auto& s : samples_)
                if (std::find(classes_.begin(), classes_.end(), s.label) == classes_.end()) classes_.push_back(s.label);
        }
        for (const auto& s : samples_) {
            if (s.features.names() != feature_names_)
                throw SchemaError("sample " + s.id + " does not share the dataset feature names");
            if (class_index(s.label) >= classes_.size())
                throw SchemaError("sample " + s.id + " has undeclared label " + s.label);
        }
    }

    const std::vector<Sample>& samples() const noexcept { return samples_; }
    const std::vector<std::string>& classes() const noexcept { return classes_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    std::size_t size() const noexcept { return samples_.size(); }

    std::size_t class_index(const std::string& label) const {
        return static_cast<std::size_t>(std::find(classes_.begin(), classes_.end(), label) - classes_.begin());
    }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> n(classes_.size(), 0);
        for (const auto& s : samples_) ++n[class_index(s.label)];
        return n;
    }

    /// Throws InsufficientDataError unless every class has `min_count` samples.
    void require_per_class(std::size_t min_count) const {
        const auto n = class_counts();
        for (std::size_t c = 0; c < n.size(); ++c)
            if (n[c] < min_count)
                throw InsufficientDataError(fmt::format("class {} has {} sample(s), need at least {}", classes_[c],
                                                        n[c], min_count));
    }

private:
    std::vector<Sample> samples_;
    std::vector<std::string> classes_;
    std::vector<std::string> feature_names_;
};

/// Per-feature z-scoring with population standard deviation; a zero spread
/// is floored to 1.
struct Standardizer {
    std::vector<std::string> feature_names;
    std::vector<double> mean;
    std::vector<double> stddev;

    FeatureVector apply(const FeatureVector& x) const {
        if (x.names() != feature_names) throw SchemaError("standardizer: feature names do not match");
        std::vector<double> v(x.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = (x[j] - mean[j]) / stddev[j];
        return FeatureVector(x.names(), std::move(v));
    }

    LabeledDataset apply(const LabeledDataset& data) const {
        std::vector<Sample> out;
        out.reserve(data.size());
        for (const auto& s : data.samples()) out.push_back({s.id, apply(s.features), s.label, s.case_id});
        return LabeledDataset(std::move(out), data.classes());
    }
};

inline Standardizer fit_standardizer(const LabeledDataset& train) {
    const std::size_t d = train.feature_names().size();
    const auto n = static_cast<double>(train.size());
    Standardizer sc{train.feature_names(), std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (const auto& s : train.samples())
        for (std::size_t j = 0; j < d; ++j) sc.mean[j] += s.features[j];
    for (double& m : sc.mean) m /= n;
    for (const auto& s : train.samples())
        for (std::size_t j = 0; j < d; ++j) sc.stddev[j] += (s.features[j] - sc.mean[j]) * (s.features[j] - sc.mean[j]);
    for (double& sd : sc.stddev) {
        sd = std::sqrt(sd / n);
        if (!(sd > 0.0)) sd = 1.0;
    }
    return sc;
}

struct StandardizedData {
    Standardizer scaler;
    LabeledDataset data;
};

inline StandardizedData standardize_fit(const LabeledDataset& train) {
    Standardizer sc = fit_standardizer(train);
    LabeledDataset transformed = sc.apply(train);
    return {std::move(sc), std::move(transformed)};
}

inline constexpr double kVarianceFloor = 1e-9;

struct GaussianBayesModel {
    std::vector<std::string> classes;
    std::vector<std::string> feature_names;
    std::vector<double> priors;
    std::vector<std::vector<double>> means;      // [class][feature]
    std::vector<std::vector<double>> variances;  // [class][feature], >= floor
};

struct FitOptions {
    /// Classes with fewer samples are rejected. Leave-one-out lowers this to
    /// 1; a single-sample class then borrows the pooled within-class variance.
    std::size_t min_samples_per_class = 2;
    double variance_floor = kVarianceFloor;
};

inline GaussianBayesModel fit(const LabeledDataset& train, const FitOptions& opt = {}) {
    train.require_per_class(std::max<std::size_t>(opt.min_samples_per_class, 1));
    const std::size_t k = train.classes().size();
    const std::size_t d = train.feature_names().size();
    const auto counts = train.class_counts();

    GaussianBayesModel m{train.classes(), train.feature_names(), std::vector<double>(k),
                         std::vector<std::vector<double>>(k, std::vector<double>(d, 0.0)),
                         std::vector<std::vector<double>>(k, std::vector<double>(d, 0.0))};

    for (std::size_t c = 0; c < k; ++c)
        m.priors[c] = static_cast<double>(counts[c]) / static_cast<double>(train.size());

    for (const auto& s : train.samples()) {
        const std::size_t c = train.class_index(s.label);
        for (std::size_t j = 0; j < d; ++j) m.means[c][j] += s.features[j];
    }
    for (std::size_t c = 0; c < k; ++c)
        for (double& mu : m.means[c]) mu /= static_cast<double>(counts[c]);

    std::vector<double> pooled_ss(d, 0.0);
    for (const auto& s : train.samples()) {
        const std::size_t c = train.class_index(s.label);
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = s.features[j] - m.means[c][j];
            m.variances[c][j] += dev * dev;
            pooled_ss[j] += dev * dev;
        }
    }
    std::size_t pooled_dof = 0;
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] >= 2) pooled_dof += counts[c] - 1;

    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < d; ++j) {
            double var;
            if (counts[c] >= 2) {
                var = m.variances[c][j] / static_cast<double>(counts[c] - 1);
            } else {
                var = pooled_dof > 0 ? pooled_ss[j] / static_cast<double>(pooled_dof) : 1.0;
            }
            m.variances[c][j] = std::max(var, opt.variance_floor);
        }
    }
    return m;
}

struct Prediction {
    std::size_t class_index = 0;
    std::string label;
    std::vector<double> posteriors;
};

/// Bayes rule with log-sum-exp normalisation; ties go to the earlier class.
inline Prediction predict(const GaussianBayesModel& model, const FeatureVector& x) {
    if (x.names() != model.feature_names) throw SchemaError("predict: feature names do not match the model");
    const std::size_t k = model.classes.size();
    std::vector<double> logp(k);
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    for (std::size_t c = 0; c < k; ++c) {
        double lp = std::log(model.priors[c]);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double var = model.variances[c][j];
            const double dev = x[j] - model.means[c][j];
            lp += -0.5 * (log_2pi + std::log(var) + dev * dev / var);
        }
        logp[c] = lp;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c)
        if (logp[c] > logp[best]) best = c;

    const double top = logp[best];
    double z = 0.0;
    for (double lp : logp) z += std::exp(lp - top);
    std::vector<double> post(k);
    for (std::size_t c = 0; c < k; ++c) post[c] = std::exp(logp[c] - top) / z;
    return {best, model.classes[best], std::move(post)};
}

/// Counts with rows = true class, columns = predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<std::string> classes)
        : classes_(std::move(classes)), counts_(classes_.size() * classes_.size(), 0) {}

    const std::vector<std::string>& classes() const noexcept { return classes_; }
    std::size_t size() const noexcept { return classes_.size(); }

    std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * size() + predicted]; }
    void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1) { counts_[truth * size() + predicted] += n; }

    std::uint64_t row_total(std::size_t truth) const {
        std::uint64_t n = 0;
        for (std::size_t p = 0; p < size(); ++p) n += at(truth, p);
        return n;
    }
    std::uint64_t trace() const {
        std::uint64_t n = 0;
        for (std::size_t c = 0; c < size(); ++c) n += at(c, c);
        return n;
    }
    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (auto c : counts_) n += c;
        return n;
    }

    /// Fractions in [0, 1]; a class with no samples reports 0.
    double class_accuracy(std::size_t c) const {
        const auto n = row_total(c);
        return n == 0 ? 0.0 : static_cast<double>(at(c, c)) / static_cast<double>(n);
    }
    double total_accuracy() const {
        const auto n = total();
        return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::vector<std::string> classes_;
    std::vector<std::uint64_t> counts_;
};

struct LoocvOptions {
    unsigned jobs = 1;
};

/// Leave-one-out: each fold standardises on the other n-1 samples, fits,
/// and predicts the held-out one. Folds are independent, so they may run on
/// several threads; the result does not depend on `jobs`.
inline std::vector<Prediction> loocv_predictions(const LabeledDataset& data, const LoocvOptions& opt = {}) {
    data.require_per_class(2);
    const std::size_t n = data.size();
    std::vector<Prediction> out(n);

    auto run_fold = [&](std::size_t i) {
        std::vector<Sample> train;
        train.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) train.push_back(data.samples()[j]);
        const LabeledDataset fold(std::move(train), data.classes());
        const auto [scaler, scaled] = standardize_fit(fold);
        FitOptions fo;
        fo.min_samples_per_class = 1;
        const auto model = fit(scaled, fo);
        out[i] = predict(model, scaler.apply(data.samples()[i].features));
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(n)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) run_fold(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    run_fold(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    workers.clear();
    if (failure) std::rethrow_exception(failure);
    return out;
}

inline ConfusionMatrix loocv(const LabeledDataset& data, const LoocvOptions& opt = {}) {
    const auto predictions = loocv_predictions(data, opt);
    ConfusionMatrix cm(data.classes());
    for (std::size_t i = 0; i < data.size(); ++i)
        cm.add(data.class_index(data.samples()[i].label), predictions[i].class_index);
    return cm;
}

/// 100 * num / den to two decimals, rounded half-up in exact integer
/// arithmetic, e.g. 286/320 -> "89.38".
inline std::string format_percent(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return "0.00";
    const std::uint64_t hundredths = (num * 20000 + den) / (2 * den);
    return fmt::format("{}.{:02d}", hundredths / 100, hundredths % 100);
}

/// One-row accuracy table: a signature name, one column per class and the
/// total accuracy.
inline std::string render_accuracy_table(const ConfusionMatrix& cm, const std::string& signature) {
    std::vector<std::string> header{"Filter texture signature"};
    for (const auto& c : cm.classes()) header.push_back(c);
    header.push_back("Total Accuracy");

    std::vector<std::string> row{signature};
    for (std::size_t c = 0; c < cm.size(); ++c) row.push_back(format_percent(cm.at(c, c), cm.row_total(c)));
    row.push_back(format_percent(cm.trace(), cm.total()) + "%");

    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = std::max(header[i].size(), row[i].size());

    std::string out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out += "  ";
            out += i == 0 ? fmt::format("{:<{}}", cells[i], width[i]) : fmt::format("{:>{}}", cells[i], width[i]);
        }
        out += '\n';
    };
    emit(header);
    std::string rule;
    for (std::size_t i = 0; i < width.size(); ++i) rule += std::string(width[i], '-') + (i + 1 < width.size() ? "  " : "");
    out += rule + '\n';
    emit(row);
    return out;
}

/// Confusion matrix as text: rows = true class, columns = predicted.
inline std::string render_confusion(const ConfusionMatrix& cm) {
    std::size_t w = 10;
    for (const auto& c : cm.classes()) w = std::max(w, c.size());
    std::string out = fmt::format("{:<{}}", "true\\pred", w);
    for (const auto& c : cm.classes()) out += fmt::format("  {:>{}}", c, w);
    out += '\n';
    for (std::size_t t = 0; t < cm.size(); ++t) {
        out += fmt::format("{:<{}}", cm.classes()[t], w);
        for (std::size_t p = 0; p < cm.size(); ++p) out += fmt::format("  {:>{}}", cm.at(t, p), w);
        out += '\n';
    }
    return out;
}

}  // namespace texbank
