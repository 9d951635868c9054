// texbank: multiresolution texture feature extraction and leave-one-out
// classification from the command line.
//
//   texbank extract  --manifest M.csv [--config C.json] --out F.csv [--jobs N]
//   texbank classify --features F.csv --out R [--label NAME] [--jobs N]
//   texbank synth    --kind corpus --seed S --per-class N --side 512 --out DIR
//   texbank bank     --nc 512 [--config C.json] --out bank.json
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "texbank/texbank.hpp"

namespace fs = std::filesystem;
using namespace texbank;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

unsigned default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

RunConfig config_or_default(const std::string& path) {
    return path.empty() ? RunConfig{} : load_run_config(path);
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    out << text;
    if (!out) throw IoError("error while writing " + file.string());
}

struct ExtractArgs {
    std::string manifest;
    std::string config;
    std::string out;
    std::string mask_dir;
    unsigned jobs = default_jobs();
};

int run_extract(const ExtractArgs& a) {
    RunConfig cfg = config_or_default(a.config);
    if (!a.mask_dir.empty()) cfg.mask_dir = a.mask_dir;
    const Manifest manifest = read_manifest(a.manifest);
    const auto samples = extract_manifest(manifest, cfg, a.jobs);
    write_feature_csv(a.out, samples);
    std::cerr << fmt::format("wrote {} samples x {} features to {}\n", samples.size(),
                             samples.front().features.size(), a.out);
    return kExitOk;
}

struct ClassifyArgs {
    std::string features;
    std::string out;
    std::string label;
    unsigned jobs = default_jobs();
};

int run_classify(const ClassifyArgs& a) {
    const LabeledDataset data = read_feature_csv(a.features);
    const ConfusionMatrix cm = loocv(data, LoocvOptions{a.jobs});
    const std::string signature = a.label.empty() ? signature_label(data.feature_names()) : a.label;

    const std::string report = render_accuracy_table(cm, signature) + "\n" + render_confusion(cm);
    write_text(a.out + ".txt", report);
    write_confusion_csv(a.out + ".confusion.csv", cm);
    write_accuracy_csv(a.out + ".accuracy.csv", cm);
    std::cout << report;
    return kExitOk;
}

struct SynthArgs {
    std::string kind = "corpus";
    std::uint64_t seed = 0;
    int per_class = 20;
    std::size_t side = 512;
    std::string out;
    double hurst = 0.5;
    double frequency = 0.0;
    double theta_deg = 0.0;
    double phase = 0.0;
    std::vector<double> beta{0.4, 0.0, 0.0, 0.0};
};

int run_synth(const SynthArgs& a) {
    const fs::path dir = a.out;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

    Manifest manifest;
    auto emit = [&](const std::string& id, const GrayImage& img, const std::string& label, const std::string& case_id) {
        const std::string name = id + ".png";
        save_png(img, dir / name);
        manifest.push_back({id, name, label, case_id});
    };

    if (a.kind == "corpus") {
        for (const auto& s : synth::four_class_corpus(a.seed, a.per_class, a.side)) emit(s.id, s.image, s.label, s.case_id);
    } else if (a.kind == "grating") {
        synth::GratingParams g;
        g.side = a.side;
        g.frequency = a.frequency > 0.0 ? a.frequency : synth::corpus_frequency(a.side);
        g.theta = a.theta_deg * std::numbers::pi / 180.0;
        g.phase = a.phase;
        emit("grating", synth::grating(g), "grating", "grating");
    } else if (a.kind == "fbm") {
        emit(fmt::format("fbm_h{:.2f}", a.hurst), synth::fbm_surface({a.side, a.hurst, a.seed}), "fbm", "fbm");
    } else if (a.kind == "gmrf" || a.kind == "grf_texture") {
        if (a.beta.size() != 4) throw ConfigError("--beta takes four values: h,v,d1,d2");
        synth::GmrfParams p{a.side, {a.beta[0], a.beta[1], a.beta[2], a.beta[3]}, a.seed};
        emit("gmrf", synth::gmrf_texture(p), "gmrf", "gmrf");
    } else if (a.kind == "noise") {
        emit("noise", synth::white_noise(a.side, a.seed), "noise", "noise");
    } else {
        throw ConfigError("unknown synth kind: " + a.kind);
    }
    write_manifest(dir / "manifest.csv", manifest);
    std::cerr << fmt::format("wrote {} image(s) and manifest.csv to {}\n", manifest.size(), dir.string());
    return kExitOk;
}

struct BankArgs {
    std::size_t nc = 512;
    std::string config;
    std::string out;
};

int run_bank(const BankArgs& a) {
    const RunConfig cfg = config_or_default(a.config);
    const BankConfig bank = plan_bank(a.nc, cfg.bank);
    write_text(a.out, to_json(bank).dump(2) + "\n");
    std::cerr << fmt::format("wrote {} filters to {}\n", bank.filters.size(), a.out);
    return kExitOk;
}

template <typename F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gabor filter bank and fixed-resolution texture features with Bayes LOOCV"};
    app.require_subcommand(1);

    ExtractArgs ex;
    auto* extract = app.add_subcommand("extract", "Extract fused feature vectors for a manifest");
    extract->add_option("--manifest", ex.manifest, "Manifest CSV (path,label,case_id[,id])")->required();
    extract->add_option("--config", ex.config, "Run configuration JSON");
    extract->add_option("--out", ex.out, "Output feature CSV")->required();
    extract->add_option("--mask-dir", ex.mask_dir, "Directory of binary PNG masks named after each image");
    extract->add_option("--jobs", ex.jobs, "Worker threads")->check(CLI::PositiveNumber);

    ClassifyArgs cl;
    auto* classify = app.add_subcommand("classify", "Leave-one-out Gaussian Bayes classification of a feature CSV");
    classify->add_option("--features", cl.features, "Feature CSV written by extract")->required();
    classify->add_option("--out", cl.out, "Report prefix: writes <out>.txt, <out>.confusion.csv, <out>.accuracy.csv")
        ->required();
    classify->add_option("--label", cl.label, "Signature name for the report row");
    classify->add_option("--jobs", cl.jobs, "Worker threads")->check(CLI::PositiveNumber);

    SynthArgs sy;
    auto* synth_cmd = app.add_subcommand("synth", "Generate seeded synthetic textures as PNG + manifest.csv");
    synth_cmd->add_option("--kind", sy.kind, "corpus | grating | fbm | gmrf (alias grf_texture) | noise")
        ->check(CLI::IsMember({"corpus", "grating", "fbm", "gmrf", "grf_texture", "noise"}));
    synth_cmd->add_option("--seed", sy.seed, "Random seed");
    synth_cmd->add_option("--per-class", sy.per_class, "Samples per class (corpus)");
    synth_cmd->add_option("--side", sy.side, "Image side in pixels (power of two)");
    synth_cmd->add_option("--out", sy.out, "Output directory")->required();
    synth_cmd->add_option("--hurst", sy.hurst, "Hurst exponent (fbm)");
    synth_cmd->add_option("--frequency", sy.frequency, "Cycles per image width (grating)");
    synth_cmd->add_option("--theta-deg", sy.theta_deg, "Orientation in degrees (grating)");
    synth_cmd->add_option("--phase", sy.phase, "Phase in radians (grating)");
    synth_cmd->add_option("--beta", sy.beta, "Interaction parameters h,v,d1,d2 (gmrf)")->delimiter(',');

    BankArgs bk;
    auto* bank_cmd = app.add_subcommand("bank", "Dump the Gabor filter bank layout as JSON");
    bank_cmd->add_option("--nc", bk.nc, "Image width in pixels (power of two)");
    bank_cmd->add_option("--config", bk.config, "Run configuration JSON (bank section)");
    bank_cmd->add_option("--out", bk.out, "Output JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (*extract) return guarded([&] { return run_extract(ex); });
    if (*classify) return guarded([&] { return run_classify(cl); });
    if (*synth_cmd) return guarded([&] { return run_synth(sy); });
    if (*bank_cmd) return guarded([&] { return run_bank(bk); });
    return kExitUsage;
}
