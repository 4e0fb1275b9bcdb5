// fastmapsvm-synth: writes reproducible synthetic corpora in the wfs dataset
// format, either a labeled noise/event dataset for training and evaluation or
// a continuous stream with bursts planted at chosen onsets for scanner runs.
//
// Exit status matches the main tool: 0 success, 1 validation error, 2 runtime
// failure.

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fastmapsvm/synthetic.hpp"
#include "fastmapsvm/wfs.hpp"

namespace {

using namespace fastmapsvm;

struct Options {
    std::uint64_t seed = 0;
    double rate = 100.0;
    double duration = 8.0;
    std::size_t channels = 3;
    std::string out;

    std::size_t n_noise = 128;
    std::size_t n_event = 128;

    double stream_duration = 600.0;
    std::vector<double> onsets;
    double peak = 6.0;
};

SyntheticConfig make_config(const Options& o) {
    SyntheticConfig cfg;
    cfg.sample_rate_hz = o.rate;
    cfg.duration_s = o.duration;
    cfg.n_channels = o.channels;
    return cfg;
}

void run_dataset(const Options& o) {
    const auto set = make_synthetic_dataset(make_config(o), o.n_noise, o.n_event, o.seed);
    save_dataset(set, o.out);
    std::cout << "wrote " << o.n_noise << " noise + " << o.n_event << " event records to "
              << o.out << "\n";
}

void run_stream(const Options& o) {
    const auto stream = make_synthetic_stream(make_config(o), o.stream_duration, o.onsets,
                                              o.peak, o.seed);
    LabeledWaveformSet set({"noise", "event"}, o.rate, o.channels);
    set.add(stream, 0);
    save_dataset(set, o.out);
    std::cout << "wrote a " << o.stream_duration << " s stream with " << o.onsets.size()
              << " bursts to " << o.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic corpus generator for the fastmapsvm toolkit"};
    app.require_subcommand(1);
    Options o;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", o.out, "dataset directory to write")->required();
        cmd->add_option("--seed", o.seed, "generator seed")->capture_default_str();
        cmd->add_option("--rate", o.rate, "sample rate in Hz")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--channels", o.channels, "channels per record")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    auto* dataset = app.add_subcommand("dataset", "labeled noise/event records");
    dataset->add_option("--noise", o.n_noise, "background-only records")
        ->capture_default_str();
    dataset->add_option("--events", o.n_event, "records with a burst")
        ->capture_default_str();
    dataset->add_option("--duration", o.duration, "record length in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_common(dataset);
    dataset->callback([&] { run_dataset(o); });

    auto* stream = app.add_subcommand("stream", "one continuous record with planted bursts");
    stream->add_option("--duration", o.stream_duration, "stream length in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    stream
        ->add_option("--onsets", o.onsets, "burst onset times in seconds, comma separated")
        ->delimiter(',');
    stream->add_option("--peak", o.peak, "burst peak over background std")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_common(stream);
    stream->callback([&] { run_stream(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
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
