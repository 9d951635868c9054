#pragma once

// Dataset manifests, run configuration, per-image feature extraction and
// the CSV/JSON files exchanged by the command-line tool.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "texbank/classify.hpp"
#include "texbank/csv.hpp"
#include "texbank/error.hpp"
#include "texbank/feature_vector.hpp"
#include "texbank/fractal.hpp"
#include "texbank/gabor.hpp"
#include "texbank/glcm.hpp"
#include "texbank/gmrf.hpp"
#include "texbank/image.hpp"
#include "texbank/quantize.hpp"
#include "texbank/rlm.hpp"
#include "texbank/synth.hpp"

namespace texbank {

struct BankSettings {
    int orientations = kDefaultOrientationCount;
    double bandwidth_octaves = kDefaultFrequencyBandwidth;
    double orientation_bandwidth = kDefaultOrientationBandwidth;  // radians
    bool circular = true;
    CircularSigma circular_sigma = CircularSigma::frequency_bandwidth;
    int energy_norm = 1;
};

struct FixedResSettings {
    int glcm_levels = kDefaultGlcmLevels;
    int glcm_distance = kDefaultGlcmDistance;
    int rlm_levels = kDefaultRlmLevels;
    int gmrf_order = 2;
    bool fd = true;
    FdMethod fd_method = FdMethod::variogram;
};

/// Defaults reproduce the reference setup: blue channel, 4 orientations,
/// 1-octave / 45-degree bandwidths, circular envelope, l1 energy.
struct RunConfig {
    Channel channel = Channel::blue;
    BankSettings bank;
    FixedResSettings fixed_res;
    std::vector<std::string> fusion{"gabor"};
    std::optional<std::filesystem::path> mask_dir;

    void validate() const {
        static const std::set<std::string> known{"gabor", "fd", "gmrf", "glcm", "rlm"};
        if (fusion.empty()) throw ConfigError("fusion list must not be empty");
        std::set<std::string> seen;
        for (const auto& name : fusion) {
            if (!known.contains(name)) throw ConfigError("unknown extractor in fusion: " + name);
            if (!seen.insert(name).second) throw ConfigError("extractor listed twice in fusion: " + name);
        }
        if (seen.contains("fd") && !fixed_res.fd) throw ConfigError("fusion uses fd but fixed_res.fd is off");
        if (bank.energy_norm != 1 && bank.energy_norm != 2) throw ConfigError("bank.energy_norm must be 1 or 2");
        if (bank.orientations < 1) throw ConfigError("bank.orientations must be >= 1");
        if (!(bank.bandwidth_octaves > 0.0)) throw ConfigError("bank.bandwidth_octaves must be positive");
        if (!(bank.orientation_bandwidth > 0.0 && bank.orientation_bandwidth < std::numbers::pi))
            throw ConfigError("bank.orientation_bandwidth_deg must lie in (0, 180)");
        if (fixed_res.glcm_levels < 2 || fixed_res.rlm_levels < 2) throw ConfigError("quantisation levels must be >= 2");
        if (fixed_res.glcm_distance < 1) throw ConfigError("fixed_res.glcm_distance must be >= 1");
        if (fixed_res.gmrf_order != 2) throw ConfigError("fixed_res.gmrf_order: only order 2 is supported");
    }
};

inline Channel parse_channel(const std::string& s) {
    if (s == "red") return Channel::red;
    if (s == "green") return Channel::green;
    if (s == "blue") return Channel::blue;
    throw ConfigError("unknown channel: " + s);
}

inline std::string channel_name(Channel c) {
    switch (c) {
        case Channel::red: return "red";
        case Channel::green: return "green";
        case Channel::blue: return "blue";
    }
    return "blue";
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys, const char* where) {
    for (const auto& [k, v] : obj.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
            throw ConfigError(fmt::format("unknown key \"{}\" in {}", k, where));
    }
}

template <typename T>
void read_key(const nlohmann::json& obj, const char* key, T& dst) {
    if (auto it = obj.find(key); it != obj.end()) {
        try {
            dst = it->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(fmt::format("bad value for \"{}\": {}", key, e.what()));
        }
    }
}

}  // namespace detail

/// Parses a RunConfig; absent keys keep their defaults, unknown keys are
/// rejected.
inline RunConfig parse_run_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    detail::reject_unknown_keys(j, {"channel", "bank", "fixed_res", "fusion", "mask_dir"}, "config");
    RunConfig cfg;
    if (j.contains("channel")) {
        std::string ch;
        detail::read_key(j, "channel", ch);
        cfg.channel = parse_channel(ch);
    }
    if (auto it = j.find("bank"); it != j.end()) {
        const auto& b = *it;
        if (!b.is_object()) throw ConfigError("bank must be an object");
        detail::reject_unknown_keys(b, {"orientations", "bandwidth_octaves", "orientation_bandwidth_deg", "circular",
                                        "circular_sigma", "energy_norm"},
                                    "bank");
        detail::read_key(b, "orientations", cfg.bank.orientations);
        detail::read_key(b, "bandwidth_octaves", cfg.bank.bandwidth_octaves);
        if (b.contains("orientation_bandwidth_deg")) {
            double deg = 0.0;
            detail::read_key(b, "orientation_bandwidth_deg", deg);
            cfg.bank.orientation_bandwidth = deg * std::numbers::pi / 180.0;
        }
        detail::read_key(b, "circular", cfg.bank.circular);
        if (b.contains("circular_sigma")) {
            std::string s;
            detail::read_key(b, "circular_sigma", s);
            if (s == "frequency_bandwidth") cfg.bank.circular_sigma = CircularSigma::frequency_bandwidth;
            else if (s == "orientation_bandwidth") cfg.bank.circular_sigma = CircularSigma::orientation_bandwidth;
            else throw ConfigError("unknown circular_sigma: " + s);
        }
        detail::read_key(b, "energy_norm", cfg.bank.energy_norm);
    }
    if (auto it = j.find("fixed_res"); it != j.end()) {
        const auto& f = *it;
        if (!f.is_object()) throw ConfigError("fixed_res must be an object");
        detail::reject_unknown_keys(f, {"glcm_levels", "glcm_distance", "rlm_levels", "gmrf_order", "fd", "fd_method"},
                                    "fixed_res");
        detail::read_key(f, "glcm_levels", cfg.fixed_res.glcm_levels);
        detail::read_key(f, "glcm_distance", cfg.fixed_res.glcm_distance);
        detail::read_key(f, "rlm_levels", cfg.fixed_res.rlm_levels);
        detail::read_key(f, "gmrf_order", cfg.fixed_res.gmrf_order);
        detail::read_key(f, "fd", cfg.fixed_res.fd);
        if (f.contains("fd_method")) {
            std::string s;
            detail::read_key(f, "fd_method", s);
            cfg.fixed_res.fd_method = parse_fd_method(s);
        }
    }
    detail::read_key(j, "fusion", cfg.fusion);
    if (auto it = j.find("mask_dir"); it != j.end() && !it->is_null()) {
        std::string dir;
        detail::read_key(j, "mask_dir", dir);
        cfg.mask_dir = dir;
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("config {} is not valid JSON: {}", path.string(), e.what()));
    }
    return parse_run_config(j);
}

inline nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j{
        {"channel", channel_name(cfg.channel)},
        {"bank",
         {{"orientations", cfg.bank.orientations},
          {"bandwidth_octaves", cfg.bank.bandwidth_octaves},
          {"orientation_bandwidth_deg", cfg.bank.orientation_bandwidth * 180.0 / std::numbers::pi},
          {"circular", cfg.bank.circular},
          {"circular_sigma", cfg.bank.circular_sigma == CircularSigma::frequency_bandwidth ? "frequency_bandwidth"
                                                                                             : "orientation_bandwidth"},
          {"energy_norm", cfg.bank.energy_norm}}},
        {"fixed_res",
         {{"glcm_levels", cfg.fixed_res.glcm_levels},
          {"glcm_distance", cfg.fixed_res.glcm_distance},
          {"rlm_levels", cfg.fixed_res.rlm_levels},
          {"gmrf_order", cfg.fixed_res.gmrf_order},
          {"fd", cfg.fixed_res.fd},
          {"fd_method", cfg.fixed_res.fd_method == FdMethod::variogram ? "variogram" : "box_counting"}}},
        {"fusion", cfg.fusion},
    };
    j["mask_dir"] = cfg.mask_dir ? nlohmann::json(cfg.mask_dir->string()) : nlohmann::json(nullptr);
    return j;
}

inline BankConfig plan_bank(std::size_t image_width, const BankSettings& s) {
    return plan_bank(image_width, s.orientations, s.bandwidth_octaves, s.orientation_bandwidth, s.circular,
                     s.circular_sigma);
}

// ---------------------------------------------------------------------------
// Manifest

struct ManifestRow {
    std::string id;
    std::filesystem::path path;
    std::string label;
    std::string case_id;
};

using Manifest = std::vector<ManifestRow>;

/// Reads a manifest CSV with header columns path,label,case_id and an
/// optional id column (default: file stem). Relative paths resolve against
/// the manifest's directory.
inline Manifest read_manifest(const std::filesystem::path& file) {
    const auto rows = csv::read_file(file);
    if (rows.empty()) throw SchemaError("manifest " + file.string() + " is empty");
    const auto& header = rows.front();
    auto col = [&](const char* name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto path_col = col("path");
    const auto label_col = col("label");
    const auto case_col = col("case_id");
    const auto id_col = col("id");
    if (!path_col || !label_col || !case_col)
        throw SchemaError("manifest " + file.string() + " needs columns path,label,case_id");

    const auto base = file.parent_path();
    Manifest out;
    std::unordered_set<std::string> paths, ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw SchemaError(fmt::format("manifest {} line {}: expected {} fields, got {}", file.string(), r + 1,
                                          header.size(), row.size()));
        ManifestRow m;
        m.path = row[*path_col];
        if (m.path.is_relative()) m.path = base / m.path;
        m.label = row[*label_col];
        m.case_id = row[*case_col];
        m.id = id_col ? row[*id_col] : std::filesystem::path(row[*path_col]).stem().string();
        if (m.label.empty()) throw SchemaError(fmt::format("manifest {} line {}: empty label", file.string(), r + 1));
        if (!paths.insert(m.path.lexically_normal().string()).second)
            throw SchemaError(fmt::format("manifest {} line {}: duplicate path {}", file.string(), r + 1,
                                          row[*path_col]));
        if (!ids.insert(m.id).second)
            throw SchemaError(fmt::format("manifest {} line {}: duplicate id {}", file.string(), r + 1, m.id));
        out.push_back(std::move(m));
    }
    if (out.empty()) throw SchemaError("manifest " + file.string() + " has no samples");
    return out;
}

inline void write_manifest(const std::filesystem::path& file, const Manifest& rows) {
    std::vector<csv::Row> out{{"id", "path", "label", "case_id"}};
    for (const auto& r : rows) out.push_back({r.id, r.path.generic_string(), r.label, r.case_id});
    csv::write_file(file, out);
}

// ---------------------------------------------------------------------------
// Extraction

/// Single-image extractor bound to one configuration. Construct once per
/// image side; `extract` is const and safe to call from several threads.
class FeatureExtractor {
public:
    FeatureExtractor(RunConfig cfg, std::size_t padded_side)
        : cfg_(std::move(cfg)), bank_(plan_bank(padded_side, cfg_.bank)) {
        cfg_.validate();
    }

    const RunConfig& config() const noexcept { return cfg_; }
    const SampledBank& bank() const noexcept { return bank_; }

    /// Runs the fusion list over an already mean-removed image.
    FeatureVector extract(const ZeroMeanImage& img) const {
        const ZeroMeanImage padded = pad_to_pow2(img);
        std::vector<FeatureVector> parts;
        for (const auto& name : cfg_.fusion) {
            if (name == "gabor") {
                parts.push_back(bank_.features(padded, cfg_.bank.energy_norm));
            } else if (name == "fd") {
                const GrayImage& surface = img.width() == img.height() ? img.image() : padded.image();
                parts.push_back(FeatureVector({"fd"}, {fractal_dimension(surface, cfg_.fixed_res.fd_method)}));
            } else if (name == "gmrf") {
                parts.push_back(gmrf_features(img.image()));
            } else if (name == "glcm") {
                parts.push_back(glcm_features(quantize(img.image(), cfg_.fixed_res.glcm_levels),
                                              cfg_.fixed_res.glcm_distance));
            } else if (name == "rlm") {
                parts.push_back(rlm_features(quantize(img.image(), cfg_.fixed_res.rlm_levels)));
            }
        }
        return fuse(std::span<const FeatureVector>(parts));
    }

    /// Channel selection, optional mask, mean removal, then `extract`.
    FeatureVector extract(const RgbImage& rgb, const std::vector<bool>* mask = nullptr) const {
        const GrayImage gray = extract_channel(rgb, cfg_.channel);
        return extract(mask ? apply_mask(gray, *mask) : subtract_mean(gray));
    }

private:
    RunConfig cfg_;
    SampledBank bank_;
};

inline std::filesystem::path mask_path_for(const std::filesystem::path& mask_dir, const std::filesystem::path& image) {
    return mask_dir / (image.stem().string() + ".png");
}

/// Extracts every manifest row with `jobs` workers. Rows come back in
/// manifest order; a failure is rethrown with the sample id attached.
inline std::vector<Sample> extract_manifest(const Manifest& manifest, const RunConfig& cfg, unsigned jobs = 1) {
    if (manifest.empty()) throw SchemaError("manifest has no samples");
    cfg.validate();

    std::vector<Sample> out(manifest.size());
    std::optional<FeatureExtractor> extractor;
    std::once_flag init;
    std::size_t side = 0;

    auto process = [&](std::size_t i) {
        const auto& row = manifest[i];
        const RgbImage rgb = load_image(row.path);
        const std::size_t padded = next_pow2(std::max(rgb.width(), rgb.height()));
        std::call_once(init, [&] {
            side = padded;
            extractor.emplace(cfg, padded);
        });
        if (padded != side)
            throw SizeError(fmt::format("padded side {} differs from the first image's {}", padded, side));
        std::optional<std::vector<bool>> mask;
        if (cfg.mask_dir) mask = load_mask(mask_path_for(*cfg.mask_dir, row.path), rgb.width(), rgb.height());
        out[i] = Sample{row.id, extractor->extract(rgb, mask ? &*mask : nullptr), row.label, row.case_id};
    };

    auto annotate = [&](std::size_t i, const std::exception_ptr& e) -> std::exception_ptr {
        const std::string where = fmt::format("sample {} ({}): ", manifest[i].id, manifest[i].path.string());
        try {
            std::rethrow_exception(e);
        } catch (const IoError& x) {
            return std::make_exception_ptr(IoError(where + x.what()));
        } catch (const ConfigError& x) {
            return std::make_exception_ptr(ConfigError(where + x.what()));
        } catch (const FormatError& x) {
            return std::make_exception_ptr(FormatError(where + x.what()));
        } catch (const SizeError& x) {
            return std::make_exception_ptr(SizeError(where + x.what()));
        } catch (const SingularError& x) {
            return std::make_exception_ptr(SingularError(where + x.what()));
        } catch (const DegenerateError& x) {
            return std::make_exception_ptr(DegenerateError(where + x.what()));
        } catch (const Error& x) {
            return std::make_exception_ptr(SchemaError(where + x.what()));
        } catch (...) {
            return std::current_exception();
        }
    };

    std::vector<std::exception_ptr> errors(manifest.size());
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(manifest.size())));
    // The first row fixes the bank size, so run it before fanning out.
    try {
        process(0);
    } catch (...) {
        errors[0] = std::current_exception();
    }
    if (!errors[0]) {
        std::atomic<std::size_t> next{1};
        auto worker = [&] {
            for (std::size_t i = next++; i < manifest.size(); i = next++) {
                try {
                    process(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        if (jobs == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (errors[i]) std::rethrow_exception(annotate(i, errors[i]));
    return out;
}

// ---------------------------------------------------------------------------
// Feature CSV

inline std::string format_feature_value(double v) { return fmt::format("{:.12g}", v); }

inline void write_feature_csv(const std::filesystem::path& file, const std::vector<Sample>& samples) {
    if (samples.empty()) throw SchemaError("no samples to write");
    std::vector<csv::Row> rows;
    csv::Row header{"id", "label", "case_id"};
    for (const auto& n : samples.front().features.names()) header.push_back(n);
    rows.push_back(std::move(header));
    for (const auto& s : samples) {
        if (s.features.names() != samples.front().features.names())
            throw SchemaError("sample " + s.id + " has a different feature schema");
        csv::Row r{s.id, s.label, s.case_id};
        for (double v : s.features.values()) r.push_back(format_feature_value(v));
        rows.push_back(std::move(r));
    }
    csv::write_file(file, rows);
}

inline double parse_double(const std::string& s, std::size_t line, const std::string& column) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && *b == ' ') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v))
        throw SchemaError(fmt::format("line {}: column {} is not a finite number: \"{}\"", line, column, s));
    return v;
}

inline LabeledDataset read_feature_csv(const std::filesystem::path& file) {
    const auto rows = csv::read_file(file);
    if (rows.empty()) throw SchemaError("feature file " + file.string() + " is empty");
    const auto& header = rows.front();
    if (header.size() < 4 || header[0] != "id" || header[1] != "label" || header[2] != "case_id")
        throw SchemaError("feature file " + file.string() + " must start with id,label,case_id and one feature");
    const std::vector<std::string> names(header.begin() + 3, header.end());
    std::vector<Sample> samples;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw SchemaError(fmt::format("feature file {} line {}: expected {} fields, got {}", file.string(), r + 1,
                                          header.size(), row.size()));
        std::vector<double> values;
        values.reserve(names.size());
        for (std::size_t c = 3; c < row.size(); ++c) values.push_back(parse_double(row[c], r + 1, header[c]));
        if (row[1].empty()) throw SchemaError(fmt::format("feature file {} line {}: empty label", file.string(), r + 1));
        samples.push_back({row[0], FeatureVector(names, std::move(values)), row[1], row[2]});
    }
    if (samples.empty()) throw InsufficientDataError("feature file " + file.string() + " has no samples");
    return LabeledDataset(std::move(samples));
}

/// Confusion matrix CSV: header "true\predicted,<classes...>", one row per
/// true class.
inline void write_confusion_csv(const std::filesystem::path& file, const ConfusionMatrix& cm) {
    std::vector<csv::Row> rows;
    csv::Row header{"true\\predicted"};
    for (const auto& c : cm.classes()) header.push_back(c);
    rows.push_back(std::move(header));
    for (std::size_t t = 0; t < cm.size(); ++t) {
        csv::Row r{cm.classes()[t]};
        for (std::size_t p = 0; p < cm.size(); ++p) r.push_back(fmt::format("{}", cm.at(t, p)));
        rows.push_back(std::move(r));
    }
    csv::write_file(file, rows);
}

/// Per-class and total accuracy as CSV (class,correct,total,accuracy_percent).
inline void write_accuracy_csv(const std::filesystem::path& file, const ConfusionMatrix& cm) {
    std::vector<csv::Row> rows{{"class", "correct", "total", "accuracy_percent"}};
    for (std::size_t c = 0; c < cm.size(); ++c)
        rows.push_back({cm.classes()[c], fmt::format("{}", cm.at(c, c)), fmt::format("{}", cm.row_total(c)),
                        format_percent(cm.at(c, c), cm.row_total(c))});
    rows.push_back({"total", fmt::format("{}", cm.trace()), fmt::format("{}", cm.total()),
                    format_percent(cm.trace(), cm.total())});
    csv::write_file(file, rows);
}

/// Signature label in the G_f(E & FD) style, e.g. "Gf(E & FD)".
inline std::string signature_label(const std::vector<std::string>& feature_names) {
    std::vector<std::string> parts;
    auto has_prefix = [&](const char* p) {
        return std::any_of(feature_names.begin(), feature_names.end(),
                           [&](const std::string& n) { return n.starts_with(p); });
    };
    if (has_prefix("gabor_")) parts.emplace_back("E");
    if (std::find(feature_names.begin(), feature_names.end(), "fd") != feature_names.end()) parts.emplace_back("FD");
    if (has_prefix("gmrf_")) parts.emplace_back("GMRF");
    if (has_prefix("glcm_")) parts.emplace_back("CM");
    if (has_prefix("rlm_")) parts.emplace_back("RLM");
    if (parts.empty()) return "features";
    std::string joined;
    for (std::size_t i = 0; i < parts.size(); ++i) joined += (i ? " & " : "") + parts[i];
    return has_prefix("gabor_") ? "Gf(" + joined + ")" : joined;
}

}  // namespace texbank
