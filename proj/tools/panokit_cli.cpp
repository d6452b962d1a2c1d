// panokit: command-line front end for the panorama toolkit.
//
// Every subcommand reads its inputs completely before writing anything, writes
// outputs under a ".partial" name, and renames them into place only after all
// of them were produced. Errors go to stderr as a single JSON line.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "panokit/panokit.hpp"

namespace fs = std::filesystem;
using panokit::Tensor;
using json = panokit::io::json;

namespace {

constexpr int kSchemaVersion = 1;

int verbosity() {
    const char* env = std::getenv("PANOKIT_VERBOSITY");
    if (!env || !*env) return 1;
    try {
        return std::stoi(env);
    } catch (const std::exception&) {
        return 1;
    }
}

void log_info(const std::string& msg) {
    if (verbosity() >= 1) std::cerr << "panokit: " << msg << '\n';
}

void log_debug(const std::string& msg) {
    if (verbosity() >= 2) std::cerr << "panokit: " << msg << '\n';
}

// Outputs ---------------------------------------------------------------------

/// Stages output files and directories, committing them together.
class OutputSet {
public:
    OutputSet() = default;
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    ~OutputSet() {
        std::error_code ec;
        for (const auto& s : staged_) fs::remove_all(s.temp, ec);
    }

    void file(const fs::path& target, const std::function<void(const fs::path&)>& write) {
        stage(target, false, write);
    }

    void text(const fs::path& target, const std::string& contents) {
        file(target, [&](const fs::path& p) {
            std::ofstream out(p, std::ios::binary | std::ios::trunc);
            if (!out) throw panokit::Error("cannot open '" + p.string() + "' for writing");
            out << contents;
            if (!out) throw panokit::Error("failed writing '" + p.string() + "'");
        });
    }

    void report(const fs::path& target, const json& doc) { text(target, doc.dump(2) + "\n"); }

    /// Target must not exist yet or be an empty directory.
    void directory(const fs::path& target, const std::function<void(const fs::path&)>& write) {
        if (fs::exists(target) && !(fs::is_directory(target) && fs::is_empty(target)))
            throw panokit::InvalidArgument("output directory '" + target.string() + "' exists and is not empty");
        stage(target, true, write);
    }

    void commit() {
        for (auto& s : staged_) {
            if (s.is_dir && fs::exists(s.target)) fs::remove(s.target);
            fs::rename(s.temp, s.target);
            log_debug("wrote " + s.target.string());
        }
        staged_.clear();
    }

private:
    struct Staged {
        fs::path target, temp;
        bool is_dir;
    };

    void stage(const fs::path& target, bool is_dir, const std::function<void(const fs::path&)>& write) {
        for (const auto& s : staged_)
            if (fs::weakly_canonical(s.target) == fs::weakly_canonical(target))
                throw panokit::InvalidArgument("output '" + target.string() + "' given twice");
        fs::path temp = target;
        temp += ".partial";
        std::error_code ec;
        fs::remove_all(temp, ec);
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        staged_.push_back({target, temp, is_dir});
        write(temp);
    }

    std::vector<Staged> staged_;
};

json report_header(const std::string& command, std::uint64_t seed) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    j["seed"] = seed;
    return j;
}

json shape_json(const panokit::Shape& s) {
    return json{{"channels", s.channels}, {"frames", s.frames}, {"height", s.height}, {"width", s.width}};
}

// Option state ----------------------------------------------------------------

struct Global {
    std::uint64_t seed = 0;
};

struct SampleNoise {
    std::size_t radius = 64;
    std::size_t channels = 4;
    std::size_t frames = 1;
    bool latitude_aware = false;
    std::string output;
};

struct AnalyzeSpectrum {
    std::string input;
    double threshold = 0.99;
    std::string report;
};

struct SimulateDenoise {
    std::string predictor = "zero-velocity";
    std::size_t steps = 50;
    bool rotated = false;
    bool latitude_aware = false;
    std::size_t window = 0;
    std::size_t overlap = 0;
    std::string mask, reference, target;
    double scale = 1.0;
    std::string conditioning;
    std::string input, output, report;
};

struct Decode {
    std::string decoder = "reference-conv";
    std::size_t pad_r = 4;
    std::string input, output;
};

struct Score {
    std::string metric = "end-continuity";
    std::string input, reference, report;
    std::size_t face_size = 0;
};

struct Curate {
    panokit::curator::FilterConfig filter;
    std::vector<std::string> disable;
    std::string input, output, rejects, audit;
};

struct SeamErrorSim {
    std::size_t steps = 64;
    std::size_t width = 64;
    bool rotated = false;
    std::string model = "seam-impulse";
    std::size_t column = 0;
    std::string report;
};

// Commands --------------------------------------------------------------------

void run_sample_noise(const Global& g, const SampleNoise& o) {
    const panokit::ErpGrid grid(o.radius);
    Tensor noise = panokit::gaussian_tensor({o.channels, o.frames, grid.height(), grid.width()}, g.seed);
    if (o.latitude_aware) noise = panokit::latitude_aware_remap(noise);
    log_info("sampled " + std::to_string(noise.size()) + " values (seed " + std::to_string(g.seed) + ")");
    OutputSet out;
    out.file(o.output, [&](const fs::path& p) { panokit::io::write_tensor(p, noise); });
    out.commit();
}

void run_analyze_spectrum(const Global& g, const AnalyzeSpectrum& o) {
    const Tensor field = panokit::io::read_tensor(o.input);
    const auto rows = panokit::spectrum_report(field, o.threshold);
    const double equator = panokit::equator_support(rows);
    const auto stats = panokit::field_statistics(field).global;

    json doc = report_header("analyze-spectrum", g.seed);
    doc["input"] = o.input;
    doc["shape"] = shape_json(field.shape());
    doc["energy_threshold"] = o.threshold;
    doc["equator_support"] = equator;
    doc["statistics"] = {{"mean", stats.mean}, {"variance", stats.variance}, {"count", stats.count}};
    json out_rows = json::array();
    double worst = 0.0;
    for (const auto& r : rows) {
        const double ratio = equator > 0.0 ? r.measured_support / equator : 0.0;
        const double cosine = std::cos(r.latitude);
        const double rel = cosine > 0.0 ? std::abs(ratio / cosine - 1.0) : 0.0;
        worst = std::max(worst, rel);
        out_rows.push_back({{"row", r.row_index},
                            {"latitude", r.latitude},
                            {"measured_support", r.measured_support},
                            {"predicted_support", r.predicted_support},
                            {"support_ratio", ratio},
                            {"cos_latitude", cosine},
                            {"relative_error", rel}});
    }
    doc["max_relative_error"] = worst;
    doc["rows"] = std::move(out_rows);
    OutputSet out;
    out.report(o.report, doc);
    out.commit();
}

void run_simulate_denoise(const Global& g, const SimulateDenoise& o) {
    const auto registry = panokit::PluginRegistry::with_builtins();
    const Tensor z = panokit::io::read_tensor(o.input);
    panokit::PluginParams params;
    params.seed = g.seed;
    params.scale = o.scale;
    if (!o.target.empty()) params.target = panokit::io::read_tensor(o.target);
    const auto predictor = registry.predictor(o.predictor, params);
    const auto schedule = panokit::DenoiseSchedule::uniform(o.steps, o.rotated);
    const panokit::RunOptions opts{o.latitude_aware, o.conditioning};

    if (o.mask.empty() != o.reference.empty())
        throw panokit::InvalidArgument("--mask and --reference must be given together");
    if (!o.mask.empty() && o.window != 0)
        throw panokit::InvalidArgument("--mask cannot be combined with --window");

    std::string mode = "full";
    Tensor result;
    if (!o.mask.empty()) {
        mode = "masked";
        result = panokit::masked_denoise(z, panokit::io::read_tensor(o.mask), panokit::io::read_tensor(o.reference),
                                         schedule, predictor, g.seed, opts);
    } else if (o.window != 0) {
        mode = "windowed";
        result = panokit::windowed_long_denoise(z, o.window, o.overlap, schedule, predictor, opts);
    } else {
        result = panokit::run_denoise(z, schedule, predictor, opts);
    }
    log_info(mode + " denoise, " + std::to_string(o.steps) + " steps" + (o.rotated ? ", rotated" : ""));

    OutputSet out;
    out.file(o.output, [&](const fs::path& p) { panokit::io::write_tensor(p, result); });
    if (!o.report.empty()) {
        json doc = report_header("simulate-denoise", g.seed);
        doc["predictor"] = o.predictor;
        doc["mode"] = mode;
        doc["steps"] = o.steps;
        doc["rotated"] = o.rotated;
        doc["latitude_aware"] = o.latitude_aware;
        doc["window"] = o.window;
        doc["overlap"] = o.overlap;
        doc["shape"] = shape_json(result.shape());
        const auto stats = panokit::field_statistics(result).global;
        doc["output_statistics"] = {{"mean", stats.mean}, {"variance", stats.variance}};
        out.report(o.report, doc);
    }
    out.commit();
}

void run_decode(const Global&, const Decode& o) {
    const auto registry = panokit::PluginRegistry::with_builtins();
    const auto decoder = registry.decoder(o.decoder);
    const Tensor z = panokit::io::read_tensor(o.input);
    const Tensor frames = panokit::padded_decode(z, decoder, o.pad_r);
    if (o.pad_r < decoder.receptive_half_width)
        log_info("pad radius " + std::to_string(o.pad_r) + " is below the decoder's receptive half-width " +
                 std::to_string(decoder.receptive_half_width));
    OutputSet out;
    out.directory(o.output, [&](const fs::path& p) { panokit::io::write_png_frames(p, frames); });
    out.commit();
    log_info("decoded " + std::to_string(frames.frames()) + " frames");
}

void run_score(const Global& g, const Score& o) {
    const panokit::VideoFrames video(panokit::io::read_png_frames(o.input));
    const Tensor& t = video.tensor();
    json doc = report_header("score", g.seed);
    doc["input"] = o.input;
    doc["metric"] = o.metric;
    doc["shape"] = shape_json(t.shape());

    if (o.metric == "end-continuity") {
        const auto rep = panokit::end_continuity(video);
        doc["score"] = rep.mean;
        doc["per_frame"] = rep.per_frame;
        doc["row_profile"] = rep.row_profile;
    } else if (o.metric == "seam-excess") {
        if (o.reference.empty()) throw panokit::InvalidArgument("seam-excess needs --reference frames");
        const panokit::VideoFrames ref(panokit::io::read_png_frames(o.reference));
        doc["reference"] = o.reference;
        doc["score"] = panokit::seam_excess(video, ref);
    } else {
        const std::string name = o.metric.substr(std::string("cubemap:").size());
        const auto metrics = panokit::builtin_face_metrics();
        const std::size_t face = o.face_size ? o.face_size : std::max<std::size_t>(1, t.height() / 2);
        const auto res = panokit::cubemap_weighted_score(video, metrics.at(name), panokit::FaceWeightTable{}, face);
        doc["face_size"] = face;
        doc["score"] = res.score;
        json faces = json::object();
        for (auto f : panokit::kCubeFaces) faces[std::string(panokit::face_name(f))] = res.per_face[static_cast<std::size_t>(f)];
        doc["per_face"] = std::move(faces);
    }
    OutputSet out;
    out.report(o.report, doc);
    out.commit();
}

void run_curate(const Global& g, Curate o) {
    for (const auto& stage : o.disable) {
        auto& f = o.filter;
        if (stage == "views") f.views_stage = false;
        else if (stage == "panorama") f.panorama_stage = false;
        else if (stage == "motion") f.motion_stage = false;
        else if (stage == "aesthetic") f.aesthetic_stage = false;
        else if (stage == "dedup") f.dedup_stage = false;
        else if (stage == "balance") f.balance_stage = false;
    }
    const auto records = panokit::io::read_records(fs::path(o.input));
    const auto res = panokit::curator::filter_pipeline(records, o.filter);
    log_info("kept " + std::to_string(res.kept.size()) + " of " + std::to_string(records.size()) + " records");

    OutputSet out;
    out.text(o.output, panokit::io::records_to_jsonl(res.kept));
    if (!o.rejects.empty()) out.text(o.rejects, panokit::io::rejects_to_jsonl(res.rejected));
    if (!o.audit.empty()) {
        json doc = report_header("curate", g.seed);
        const auto& f = o.filter;
        doc["config"] = {{"min_views", f.min_views},         {"min_motion", f.min_motion},
                         {"min_aesthetic", f.min_aesthetic}, {"dedup_threshold", f.dedup_threshold},
                         {"category_cap", f.category_cap},   {"disabled_stages", o.disable}};
        doc["input_records"] = records.size();
        doc["kept_records"] = res.kept.size();
        doc["stages"] = panokit::io::audit_to_json(res.audit);
        out.report(o.audit, doc);
    }
    out.commit();
}

void run_seam_error_sim(const Global& g, const SeamErrorSim& o) {
    const auto model = o.model == "uniform" ? panokit::SeamErrorModel::uniform()
                                            : panokit::SeamErrorModel::impulse(o.column);
    const auto e = panokit::accumulate_seam_error(model, o.steps, o.width, o.rotated);
    const auto [lo, hi] = std::ranges::minmax(e);
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= static_cast<double>(e.size());

    json doc = report_header("seam-error-sim", g.seed);
    doc["model"] = o.model;
    doc["T"] = o.steps;
    doc["W"] = o.width;
    doc["rotated"] = o.rotated;
    doc["max"] = hi;
    doc["min"] = lo;
    doc["mean"] = mean;
    doc["max_over_mean"] = mean > 0.0 ? hi / mean : 0.0;
    doc["E_T"] = e;
    OutputSet out;
    out.report(o.report, doc);
    out.commit();
}

// Errors ----------------------------------------------------------------------

int fail(const std::string& kind, const std::string& message, int code) {
    json err;
    err["schema_version"] = kSchemaVersion;
    err["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << err.dump() << '\n';
    return code;
}

CLI::Validator plugin_name(std::vector<std::string> names, const std::string& kind) {
    return CLI::Validator(
        [names, kind](std::string& v) -> std::string {
            if (std::ranges::find(names, v) != names.end()) return {};
            std::string list;
            for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
            return "unknown " + kind + " '" + v + "' (available: " + list + ")";
        },
        kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Panoramic video generation toolkit"};
    app.set_config("--config", "", "Run configuration (INI/TOML sections per subcommand)");
    app.allow_config_extras(false);
    app.require_subcommand(1);

    Global global;
    app.add_option("--seed", global.seed, "Root seed recorded in every report")->capture_default_str();

    const auto registry = panokit::PluginRegistry::with_builtins();
    auto sub = [&](const char* name, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };

    SampleNoise sn;
    CLI::App* c_sn = sub("sample-noise", "Draw a Gaussian latent on an ERP grid");
    c_sn->add_option("--radius", sn.radius, "Grid radius R (field is R x 2R)")->check(CLI::PositiveNumber)->capture_default_str();
    c_sn->add_option("--channels", sn.channels, "Channels")->check(CLI::PositiveNumber)->capture_default_str();
    c_sn->add_option("--frames", sn.frames, "Frames")->check(CLI::PositiveNumber)->capture_default_str();
    c_sn->add_flag("--latitude-aware", sn.latitude_aware, "Apply latitude-aware remapping");
    c_sn->add_option("-o,--output", sn.output, "Output tensor file")->required();

    AnalyzeSpectrum as;
    CLI::App* c_as = sub("analyze-spectrum", "Per-row DFT support versus latitude");
    c_as->add_option("-i,--input", as.input, "Input tensor file")->required()->check(CLI::ExistingFile);
    c_as->add_option("--threshold", as.threshold, "Energy fraction defining the support")
        ->check(CLI::Range(0.0, 1.0).description("in (0, 1]"))
        ->capture_default_str();
    c_as->add_option("--report", as.report, "Report JSON")->required();

    SimulateDenoise sd;
    CLI::App* c_sd = sub("simulate-denoise", "Run the flow-matching sampler with a plugin predictor");
    c_sd->add_option("--predictor", sd.predictor, "Predictor plugin")
        ->check(plugin_name(registry.predictor_names(), "predictor"))
        ->capture_default_str();
    c_sd->add_option("--steps", sd.steps, "Euler steps")->check(CLI::Range(1, 100000))->capture_default_str();
    c_sd->add_flag("--rotated", sd.rotated, "Roll the latent by the step index before each step");
    c_sd->add_flag("--latitude-aware", sd.latitude_aware, "Remap the initial latent");
    c_sd->add_option("--window", sd.window, "Temporal chunk length (0 = whole clip)")->capture_default_str();
    c_sd->add_option("--overlap", sd.overlap, "Overlap between chunks")->capture_default_str();
    c_sd->add_option("--mask", sd.mask, "Mask tensor (non-zero = generate)")->check(CLI::ExistingFile);
    c_sd->add_option("--reference", sd.reference, "Reference latent for masked elements")->check(CLI::ExistingFile);
    c_sd->add_option("--target", sd.target, "Target latent for the constant-target predictor")->check(CLI::ExistingFile);
    c_sd->add_option("--scale", sd.scale, "Predictor scale")->capture_default_str();
    c_sd->add_option("--conditioning", sd.conditioning, "Conditioning text passed to the predictor");
    c_sd->add_option("-i,--input", sd.input, "Initial latent")->required()->check(CLI::ExistingFile);
    c_sd->add_option("-o,--output", sd.output, "Output latent")->required();
    c_sd->add_option("--report", sd.report, "Optional run report");

    Decode de;
    CLI::App* c_de = sub("decode", "Padded decoding of a latent into PNG frames");
    c_de->add_option("--decoder", de.decoder, "Decoder plugin")
        ->check(plugin_name(registry.decoder_names(), "decoder"))
        ->capture_default_str();
    c_de->add_option("--pad-r", de.pad_r, "Circular padding radius in latent columns")->capture_default_str();
    c_de->add_option("-i,--input", de.input, "Latent tensor")->required()->check(CLI::ExistingFile);
    c_de->add_option("-o,--output", de.output, "Output frame directory")->required();

    Score sc;
    CLI::App* c_sc = sub("score", "Score a frame sequence");
    c_sc->add_option("--metric", sc.metric, "end-continuity | seam-excess | cubemap:<mean|total-variation>")
        ->check(CLI::Validator(
            [](std::string& v) -> std::string {
                if (v == "end-continuity" || v == "seam-excess") return {};
                if (v.starts_with("cubemap:") && panokit::builtin_face_metrics().contains(v.substr(8))) return {};
                return "unknown metric '" + v + "'";
            },
            "METRIC"))
        ->capture_default_str();
    c_sc->add_option("-i,--input", sc.input, "Frame directory")->required()->check(CLI::ExistingDirectory);
    c_sc->add_option("--reference", sc.reference, "Reference frames for seam-excess")->check(CLI::ExistingDirectory);
    c_sc->add_option("--face-size", sc.face_size, "Cube face size (0 = height / 2)")->capture_default_str();
    c_sc->add_option("--report", sc.report, "Report JSON")->required();

    Curate cu;
    CLI::App* c_cu = sub("curate", "Filter clip metadata records");
    auto& fc = cu.filter;
    c_cu->add_option("--min-views", fc.min_views, "Keep view_count >= value")->check(CLI::NonNegativeNumber)->capture_default_str();
    c_cu->add_option("--min-motion", fc.min_motion, "Keep motion_score > value")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    c_cu->add_option("--min-aesthetic", fc.min_aesthetic, "Keep aesthetic_score >= value")->check(CLI::Range(1.0, 5.0))->capture_default_str();
    c_cu->add_option("--dedup-threshold", fc.dedup_threshold, "Caption similarity treated as duplicate")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_cu->add_option("--category-cap", fc.category_cap, "Clips kept per primary POI category")->check(CLI::PositiveNumber)->capture_default_str();
    c_cu->add_option("--disable-stage", cu.disable, "Skip a stage")
        ->check(CLI::IsMember({"views", "panorama", "motion", "aesthetic", "dedup", "balance"}));
    c_cu->add_option("-i,--input", cu.input, "Records (JSON lines)")->required()->check(CLI::ExistingFile);
    c_cu->add_option("-o,--output", cu.output, "Kept records (JSON lines)")->required();
    c_cu->add_option("--rejects", cu.rejects, "Rejected records with stage and reason");
    c_cu->add_option("--audit", cu.audit, "Per-stage audit report");

    SeamErrorSim se;
    CLI::App* c_se = sub("seam-error-sim", "Accumulated seam error over T steps");
    c_se->add_option("--T", se.steps, "Denoising steps")->check(CLI::PositiveNumber)->capture_default_str();
    c_se->add_option("--W", se.width, "Latent width")->check(CLI::PositiveNumber)->capture_default_str();
    c_se->add_flag("--rotated", se.rotated, "Shift by the step index");
    c_se->add_option("--model", se.model, "Error model")->check(CLI::IsMember({"seam-impulse", "uniform"}))->capture_default_str();
    c_se->add_option("--column", se.column, "Impulse column")->capture_default_str();
    c_se->add_option("--report", se.report, "Report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*c_sn) run_sample_noise(global, sn);
        else if (*c_as) run_analyze_spectrum(global, as);
        else if (*c_sd) run_simulate_denoise(global, sd);
        else if (*c_de) run_decode(global, de);
        else if (*c_sc) run_score(global, sc);
        else if (*c_cu) run_curate(global, cu);
        else if (*c_se) run_seam_error_sim(global, se);
    } catch (const panokit::CorruptFile& e) {
        return fail("corrupt_file", e.what(), 3);
    } catch (const panokit::ShapeMismatch& e) {
        return fail("shape_mismatch", e.what(), 4);
    } catch (const panokit::InvalidArgument& e) {
        return fail("invalid_argument", e.what(), 4);
    } catch (const panokit::Error& e) {
        return fail("error", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
    return 0;
}
