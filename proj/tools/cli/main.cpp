// fastmapsvm command line tool: trains and applies metric-embedding
// classifiers, exports embedding coordinates, scans continuous streams and
// runs the robustness / sensitivity harnesses. Datasets and streams are
// directories in the wfs format; models are directories written by the
// pipeline serializer.
//
// Exit status: 0 success, 1 validation error (bad flags, bad inputs),
// 2 runtime failure (I/O errors, internal failures).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fastmapsvm/detail/format.hpp"
#include "fastmapsvm/evaluation.hpp"
#include "fastmapsvm/pipeline.hpp"
#include "fastmapsvm/scanner.hpp"
#include "fastmapsvm/svm.hpp"
#include "fastmapsvm/wfs.hpp"

namespace {

using namespace fastmapsvm;

// Every list-valued flag arrives as one comma-separated token so that shell
// quoting stays trivial. Parse failures throw std::invalid_argument and thus
// exit with the validation status.
std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto end = comma == std::string::npos ? s.size() : comma;
        parts.push_back(s.substr(start, end - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return parts;
}

double parse_double(const std::string& flag, const std::string& token) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(flag + ": cannot parse '" + token + "' as a number");
    }
}

int parse_int(const std::string& flag, const std::string& token) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(token, &pos);
        if (pos != token.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(flag + ": cannot parse '" + token + "' as an integer");
    }
}

std::vector<double> parse_double_list(const std::string& flag, const std::string& s) {
    std::vector<double> values;
    for (const auto& token : split_list(s))
        values.push_back(parse_double(flag, token));
    return values;
}

std::vector<int> parse_int_list(const std::string& flag, const std::string& s) {
    std::vector<int> values;
    for (const auto& token : split_list(s))
        values.push_back(parse_int(flag, token));
    return values;
}

// "low:high" in Hz; the empty string disables filtering.
void apply_band(PreprocessSpec& spec, const std::string& band) {
    if (band.empty()) {
        spec.band_enabled = false;
        return;
    }
    const auto colon = band.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("--band: expected 'low:high', got '" + band + "'");
    spec.band_enabled = true;
    spec.band_low_hz = parse_double("--band", band.substr(0, colon));
    spec.band_high_hz = parse_double("--band", band.substr(colon + 1));
}

// Comma-separated gamma entries, each a literal value or the word "scale".
std::vector<GammaChoice> parse_gamma_list(const std::string& s) {
    std::vector<GammaChoice> grid;
    for (const auto& token : split_list(s)) {
        if (token == "scale")
            grid.push_back({true, 0.0});
        else
            grid.push_back({false, parse_double("--grid-gamma", token)});
    }
    return grid;
}

// Flag storage shared by all subcommands; each subcommand binds only the
// flags it understands.
struct Options {
    std::uint64_t seed = 0;
    int jobs = 1;

    std::string distance = "ncc";
    int ndim = 8;
    std::string band = "1:20";
    int poles = 4;
    std::string grid_c = "0.1,1,10,100";
    std::string grid_gamma = "scale,0.01,0.1,1";
    int folds = 5;

    std::string data, model, out, stream;

    double window_s = 8.0;
    double stride_s = 2.0;
    double threshold = 0.0;

    double sigma_max = 6.0;
    double sigma_step = 0.5;
    double shift_s = 2.0;

    std::string axis = "train-size";
    std::string values;

    int grid_n = 0;
    std::string grid_out;
};

PipelineConfig make_config(const Options& o) {
    PipelineConfig cfg;
    cfg.dim = o.ndim;
    cfg.seed = o.seed;
    cfg.jobs = o.jobs;
    cfg.distance = o.distance;
    cfg.preprocessing.poles = o.poles;
    apply_band(cfg.preprocessing, o.band);
    cfg.grid.c_grid = parse_double_list("--grid-c", o.grid_c);
    cfg.grid.gamma_grid = parse_gamma_list(o.grid_gamma);
    cfg.grid.folds = o.folds;
    return cfg;
}

// Output files are staged in memory and written only after the subcommand has
// finished computing, so a failed run leaves no partial output behind.
void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

std::vector<Waveform> waveforms_of(const LabeledWaveformSet& set) {
    std::vector<Waveform> waves;
    waves.reserve(set.size());
    for (const auto& item : set.items())
        waves.push_back(item.waveform);
    return waves;
}

FastMapSVMModel load_model_with_jobs(const std::string& dir, int jobs) {
    auto model = load_model(dir);
    model.config.jobs = jobs;
    return model;
}

void run_train(const Options& o) {
    const auto train = load_dataset(o.data);
    const auto model = fit(train, make_config(o));
    save_model(model, o.out);
    const auto& g = model.grid_result;
    std::cout << "trained on " << train.size() << " items ("
              << train.count_label(0) << " " << train.class_names()[0] << " / "
              << train.count_label(1) << " " << train.class_names()[1] << ")\n"
              << "effective embedding dimension " << model.embedding.effective_dim << "\n"
              << "selected c=" << detail::format_double(g.best_c)
              << " gamma=" << detail::format_double(g.best_resolved_gamma)
              << " cv-score=" << detail::format_double(g.best_score) << "\n"
              << "model written to " << o.out << "\n";
}

void run_predict(const Options& o) {
    const auto model = load_model_with_jobs(o.model, o.jobs);
    const auto data = load_dataset(o.data);
    const auto preds = predict(model, waveforms_of(data));

    std::string csv = "id,label,score\n";
    for (std::size_t i = 0; i < preds.size(); ++i) {
        csv += data[i].waveform.id();
        csv += ',';
        csv += std::to_string(preds[i].label);
        csv += ',';
        csv += detail::format_double(preds[i].score);
        csv += '\n';
    }
    write_file(o.out, csv);
    std::cout << "wrote " << preds.size() << " predictions to " << o.out << "\n";
}

// Decision values on an n-by-n grid spanning the first two standardized
// embedding dimensions (remaining dimensions held at zero), padded ten
// percent beyond the data range on each side.
std::string surface_csv(const FastMapSVMModel& model,
                        const std::vector<std::vector<double>>& coords, int n) {
    if (coords.empty())
        throw std::invalid_argument("--grid: dataset is empty, no range to span");
    const std::size_t dim = coords.front().size();
    if (dim < 2)
        throw std::invalid_argument("--grid: model embedding has fewer than two dimensions");

    double lo[2], hi[2];
    for (int d = 0; d < 2; ++d) {
        lo[d] = coords.front()[d];
        hi[d] = coords.front()[d];
        for (const auto& row : coords) {
            lo[d] = std::min(lo[d], row[d]);
            hi[d] = std::max(hi[d], row[d]);
        }
        const double span = hi[d] - lo[d];
        const double pad = span > 0 ? 0.1 * span : 1.0;
        lo[d] -= pad;
        hi[d] += pad;
    }

    std::string csv = "c1,c2,decision\n";
    std::vector<double> point(dim, 0.0);
    for (int i = 0; i < n; ++i) {
        point[0] = lo[0] + (hi[0] - lo[0]) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            point[1] = lo[1] + (hi[1] - lo[1]) * j / (n - 1);
            csv += detail::format_double(point[0]);
            csv += ',';
            csv += detail::format_double(point[1]);
            csv += ',';
            csv += detail::format_double(decision_function(model.svm, point));
            csv += '\n';
        }
    }
    return csv;
}

void run_embed(const Options& o) {
    const auto model = load_model_with_jobs(o.model, o.jobs);
    const auto data = load_dataset(o.data);
    const auto coords = embed_scaled(model, waveforms_of(data));

    const std::size_t dim = coords.empty() ? 0 : coords.front().size();
    std::string csv = "id,label";
    for (std::size_t d = 0; d < dim; ++d)
        csv += ",c" + std::to_string(d + 1);
    csv += '\n';
    for (std::size_t i = 0; i < coords.size(); ++i) {
        csv += data[i].waveform.id();
        csv += ',';
        csv += std::to_string(data[i].label);
        for (const double c : coords[i]) {
            csv += ',';
            csv += detail::format_double(c);
        }
        csv += '\n';
    }

    // The surface is computed before anything is written so that a surface
    // failure cannot leave the coordinate file behind on its own.
    std::string surface;
    if (o.grid_n > 0)
        surface = surface_csv(model, coords, o.grid_n);

    write_file(o.out, csv);
    std::cout << "wrote " << coords.size() << " embeddings to " << o.out << "\n";
    if (o.grid_n > 0) {
        write_file(o.grid_out, surface);
        std::cout << "wrote " << o.grid_n << "x" << o.grid_n << " decision surface to "
                  << o.grid_out << "\n";
    }
}

void run_scan(const Options& o) {
    const auto model = load_model_with_jobs(o.model, o.jobs);
    const auto streams = load_dataset(o.stream);
    if (streams.size() != 1)
        throw std::invalid_argument("scan: stream dataset must hold exactly one item, got " +
                                    std::to_string(streams.size()));
    const auto& stream = streams[0].waveform;

    const auto windows = scan_window_scores(model, stream, o.window_s, o.stride_s);
    const auto detections = merge_hits(windows, o.stride_s, o.threshold);
    std::size_t raw_hits = 0;
    for (const auto& w : windows)
        if (w.score > o.threshold && w.score > 0.0)
            ++raw_hits;

    write_file(o.out, detections_csv(detections));
    std::cout << "scored " << windows.size() << " windows, " << raw_hits << " hits, "
              << detections.size() << " detections\n"
              << "detections written to " << o.out << "\n";
}

void run_eval_noise(const Options& o) {
    const auto model = load_model_with_jobs(o.model, o.jobs);
    const auto data = load_dataset(o.data);
    const auto rows = noise_robustness_experiment(model, data, o.sigma_max, o.sigma_step,
                                                  -o.shift_s, o.shift_s, o.seed);
    write_file(o.out, metrics_csv(rows));
    std::cout << "wrote " << rows.size() << " noise levels to " << o.out << "\n";
}

void run_eval_sweep(const Options& o) {
    const auto data = load_dataset(o.data);
    const auto cfg = make_config(o);

    SweepAxis axis;
    if (o.axis == "train-size")
        axis = SweepAxis::kTrainSize;
    else if (o.axis == "k")
        axis = SweepAxis::kK;
    else
        throw std::invalid_argument("--axis: expected 'train-size' or 'k', got '" + o.axis +
                                    "'");

    const auto values = parse_int_list("--values", o.values);
    const auto result = sensitivity_sweep(data, cfg, axis, values, o.seed);
    write_file(o.out, metrics_csv(result.rows));
    std::cout << "evaluated " << result.rows.size() << " settings on "
              << result.eval_ids.size() << " held-out items, table written to " << o.out
              << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FastMapSVM waveform classification toolkit"};
    app.require_subcommand(1);
    Options o;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", o.seed, "seed for every random choice the command makes")
            ->capture_default_str();
        cmd->add_option("--jobs", o.jobs, "worker threads for distance and window scoring")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    const auto add_training = [&](CLI::App* cmd) {
        cmd->add_option("--distance", o.distance, "pairwise distance registry name")
            ->capture_default_str();
        cmd->add_option("--ndim", o.ndim, "embedding dimension K")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--band", o.band,
                        "bandpass corners in Hz as low:high, empty string disables filtering")
            ->capture_default_str();
        cmd->add_option("--poles", o.poles, "bandpass filter poles")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--grid-c", o.grid_c, "comma-separated soft-margin C grid")
            ->capture_default_str();
        cmd->add_option("--grid-gamma", o.grid_gamma,
                        "comma-separated rbf gamma grid, entries are numbers or 'scale'")
            ->capture_default_str();
        cmd->add_option("--folds", o.folds, "cross-validation folds for the grid search")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    auto* train = app.add_subcommand("train", "fit a model on a labeled dataset");
    train->add_option("--data", o.data, "training dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    train->add_option("--out", o.out, "model directory to write")->required();
    add_training(train);
    add_common(train);
    train->callback([&] { run_train(o); });

    auto* predict = app.add_subcommand("predict", "classify a labeled dataset with a model");
    predict->add_option("--model", o.model, "model directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    predict->add_option("--data", o.data, "dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    predict->add_option("--out", o.out, "CSV to write: id,label,score")->required();
    add_common(predict);
    predict->callback([&] { run_predict(o); });

    auto* embed = app.add_subcommand("embed", "export standardized embedding coordinates");
    embed->add_option("--model", o.model, "model directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    embed->add_option("--data", o.data, "dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    embed->add_option("--out", o.out, "CSV to write: id,label,c1..cK")->required();
    auto* grid_opt =
        embed->add_option("--grid", o.grid_n, "also sample the decision surface on an n-by-n grid")
            ->check(CLI::Range(2, 10000));
    auto* grid_out_opt =
        embed->add_option("--grid-out", o.grid_out, "CSV for the decision surface: c1,c2,decision");
    grid_opt->needs(grid_out_opt);
    grid_out_opt->needs(grid_opt);
    add_common(embed);
    embed->callback([&] { run_embed(o); });

    auto* scan = app.add_subcommand("scan", "detect events in a continuous stream");
    scan->add_option("--model", o.model, "model directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    scan->add_option("--stream", o.stream, "single-item dataset directory holding the stream")
        ->required()
        ->check(CLI::ExistingDirectory);
    scan->add_option("--out", o.out, "CSV to write: start_s,end_s,score,window_count")
        ->required();
    scan->add_option("--window-s", o.window_s, "window length in seconds")
        ->capture_default_str();
    scan->add_option("--stride-s", o.stride_s, "window stride in seconds")
        ->capture_default_str();
    scan->add_option("--threshold", o.threshold, "decision-score detection threshold")
        ->capture_default_str();
    add_common(scan);
    scan->callback([&] { run_scan(o); });

    auto* eval_noise =
        app.add_subcommand("eval-noise", "metrics vs additive noise level on a dataset");
    eval_noise->add_option("--model", o.model, "model directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval_noise->add_option("--data", o.data, "dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval_noise->add_option("--out", o.out, "metrics CSV to write")->required();
    eval_noise->add_option("--sigma-max", o.sigma_max, "largest noise sigma, in channel-std units")
        ->capture_default_str();
    eval_noise->add_option("--sigma-step", o.sigma_step, "sigma increment between rows")
        ->capture_default_str();
    eval_noise
        ->add_option("--shift-s", o.shift_s,
                     "items are circularly shifted by a uniform offset in [-shift, +shift] seconds")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    add_common(eval_noise);
    eval_noise->callback([&] { run_eval_noise(o); });

    auto* eval_sweep =
        app.add_subcommand("eval-sweep", "metrics vs training-set size or embedding dimension");
    eval_sweep->add_option("--data", o.data, "dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval_sweep->add_option("--axis", o.axis, "sweep axis: train-size or k")
        ->check(CLI::IsMember({"train-size", "k"}))
        ->capture_default_str();
    eval_sweep->add_option("--values", o.values, "comma-separated axis values")->required();
    eval_sweep->add_option("--out", o.out, "metrics CSV to write")->required();
    add_training(eval_sweep);
    add_common(eval_sweep);
    eval_sweep->callback([&] { run_eval_sweep(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 treats --help as a parse interrupt with exit status 0; real
        // parse problems collapse onto the validation status.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
