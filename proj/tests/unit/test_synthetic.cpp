#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fastmapsvm/synthetic.hpp"
#include "support/oracles.hpp"

using namespace fastmapsvm;

namespace {

bool same_samples(const Waveform& a, const Waveform& b) {
    if (a.n_channels() != b.n_channels() || a.n_samples() != b.n_samples()) return false;
    for (std::size_t c = 0; c < a.n_channels(); ++c) {
        const auto ca = a.channel(c);
        const auto cb = b.channel(c);
        if (!std::equal(ca.begin(), ca.end(), cb.begin())) return false;
    }
    return true;
}

double peak_abs(const Waveform& w) {
    double peak = 0.0;
    for (std::size_t c = 0; c < w.n_channels(); ++c)
        for (float v : w.channel(c)) peak = std::max(peak, std::abs(static_cast<double>(v)));
    return peak;
}

}  // namespace

TEST_CASE("datasets come out labeled, named and shaped as configured") {
    SyntheticConfig cfg;
    cfg.duration_s = 3.0;
    cfg.n_channels = 2;
    cfg.sample_rate_hz = 50.0;
    const auto set = make_synthetic_dataset(cfg, 5, 7, 1);

    REQUIRE(set.size() == 12);
    CHECK(set.count_label(0) == 5);
    CHECK(set.count_label(1) == 7);
    CHECK(set.class_names()[0] == "noise");
    CHECK(set.class_names()[1] == "event");
    CHECK(set.sample_rate_hz() == 50.0);
    CHECK(set.n_channels() == 2);
    CHECK(set[0].waveform.id() == "ns_0000");
    CHECK(set[4].waveform.id() == "ns_0004");
    CHECK(set[5].waveform.id() == "ev_0000");
    CHECK(set[11].waveform.id() == "ev_0006");
    for (const auto& item : set.items()) {
        CHECK(item.waveform.n_samples() == 150);
        CHECK(item.waveform.n_channels() == 2);
    }
    // noise first, events after
    for (std::size_t i = 0; i < 5; ++i) CHECK(set[i].label == 0);
    for (std::size_t i = 5; i < 12; ++i) CHECK(set[i].label == 1);
}

TEST_CASE("generation is a pure function of the seed") {
    SyntheticConfig cfg;
    cfg.duration_s = 2.0;
    const auto a = make_synthetic_dataset(cfg, 4, 4, 42);
    const auto b = make_synthetic_dataset(cfg, 4, 4, 42);
    const auto c = make_synthetic_dataset(cfg, 4, 4, 43);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(same_samples(a[i].waveform, b[i].waveform));
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_diff = any_diff || !same_samples(a[i].waveform, c[i].waveform);
    CHECK(any_diff);

    const auto s1 = make_synthetic_stream(cfg, 20.0, std::vector<double>{5.0}, 4.0, 7);
    const auto s2 = make_synthetic_stream(cfg, 20.0, std::vector<double>{5.0}, 4.0, 7);
    CHECK(same_samples(s1, s2));
}

TEST_CASE("noise is unit variance and events bury a dominant burst in it") {
    SyntheticConfig cfg;
    const auto noise = make_noise_trace(cfg, "n", 3);
    const auto event = make_event_trace(cfg, "e", 3);
    CHECK(event.n_samples() == noise.n_samples());

    for (std::size_t c = 0; c < noise.n_channels(); ++c)
        CHECK(testsupport::population_std(noise.channel(c)) == doctest::Approx(1.0).epsilon(1e-4));

    for (std::size_t c = 0; c < event.n_channels(); ++c) {
        // the background sits well below the unit burst amplitude
        CHECK(testsupport::population_std(event.channel(c)) < 0.6);
        double peak = 0.0;
        for (float v : event.channel(c)) peak = std::max(peak, std::abs(static_cast<double>(v)));
        CHECK(peak > 0.5);
        CHECK(peak < 2.0);
    }
    // peak-to-std contrast is what marks the burst, not raw amplitude
    CHECK(peak_abs(event) < peak_abs(noise));
}

TEST_CASE("streams honor their duration and onset bounds") {
    SyntheticConfig cfg;
    const auto stream = make_synthetic_stream(cfg, 30.0, std::vector<double>{10.0, 20.0}, 5.0, 1);
    CHECK(stream.n_samples() == 3000);
    CHECK(stream.n_channels() == cfg.n_channels);
    CHECK(stream.sample_rate_hz() == cfg.sample_rate_hz);

    CHECK_THROWS_WITH_AS(
        make_synthetic_stream(cfg, 30.0, std::vector<double>{30.0}, 5.0, 1),
        doctest::Contains("onset outside"), std::invalid_argument);
    CHECK_THROWS_AS(make_synthetic_stream(cfg, 30.0, std::vector<double>{-0.5}, 5.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_synthetic_stream(cfg, 0.0, std::vector<double>{}, 5.0, 1),
                    std::invalid_argument);
}
