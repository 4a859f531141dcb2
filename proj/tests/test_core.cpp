#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ccpd/rng.hpp"
#include "ccpd/signal_io.hpp"
#include "ccpd/synth.hpp"
#include "ccpd/types.hpp"

using namespace ccpd;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  const auto dir = fs::temp_directory_path() / "ccpd_test_core";
  fs::create_directories(dir);
  return dir / name;
}

Dataset tiny_dataset(size_t records, size_t samples, uint64_t seed) {
  SynthSpec spec;
  spec.sample_count = samples;
  spec.background_noise_sigma = 20.0;
  spec.pd_bursts.push_back({0.2, 0.4, 5, 100.0, 300.0});
  return generate_dataset(records / 2, records - records / 2, spec, seed);
}

}  // namespace

TEST_CASE("splitmix64 matches the published stream for seed 0") {
  SplitMix64 sm(0);
  CHECK(sm.next() == 0xE220A8397B1DCDAFULL);
  CHECK(sm.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(sm.next() == 0x06C45D188009454FULL);
}

TEST_CASE("rng streams are deterministic and well-ranged") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng r(77);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) CHECK(r.next_below(7) < 7);
}

TEST_CASE("box-muller gaussian has sane moments") {
  Rng r(5);
  const int n = 20000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = r.gaussian();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("binary round-trip preserves samples, ids, labels byte-for-byte") {
  const Dataset d = tiny_dataset(3, 64, 9);
  const auto path = temp_file("roundtrip.pds");
  save_dataset(d, path, FileFormat::Binary);
  const Dataset loaded = load_dataset(path, FileFormat::Binary);

  REQUIRE(loaded.size() == d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    CHECK(loaded.records[i].id == d.records[i].id);
    CHECK(loaded.records[i].label == d.records[i].label);
    CHECK(loaded.records[i].signal.samples == d.records[i].signal.samples);
  }
}

TEST_CASE("csv round-trip preserves the dataset") {
  const Dataset d = tiny_dataset(4, 32, 11);
  const auto path = temp_file("roundtrip.csv");
  save_dataset(d, path, FileFormat::Csv);
  const Dataset loaded = load_dataset(path, FileFormat::Csv);
  REQUIRE(loaded.size() == d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    CHECK(loaded.records[i].label == d.records[i].label);
    CHECK(loaded.records[i].signal.samples == d.records[i].signal.samples);
  }
}

TEST_CASE("saving twice yields identical bytes") {
  const Dataset d = tiny_dataset(2, 48, 3);
  const auto p1 = temp_file("det1.pds"), p2 = temp_file("det2.pds");
  save_dataset(d, p1, FileFormat::Binary);
  save_dataset(d, p2, FileFormat::Binary);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), {});
  const std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);
}

TEST_CASE("binary file size is 16-byte header plus 5 + 2N per record") {
  const Dataset d = tiny_dataset(1, 100, 4);
  const auto path = temp_file("size.pds");
  save_dataset(d, path, FileFormat::Binary);
  CHECK(fs::file_size(path) == 16 + 1 * (4 + 1 + 2 * 100));
}

TEST_CASE("empty dataset cannot be saved") {
  Dataset d;
  CHECK_THROWS_WITH_AS(save_dataset(d, temp_file("empty.pds"), FileFormat::Binary),
                       "empty dataset", std::runtime_error);
}

TEST_CASE("truncated payload is reported with the record index") {
  const Dataset d = tiny_dataset(3, 100, 5);
  const auto path = temp_file("trunc.pds");
  save_dataset(d, path, FileFormat::Binary);
  // Chop the file inside record 2's samples.
  const auto full = fs::file_size(path);
  fs::resize_file(path, full - 50);
  try {
    load_dataset(path, FileFormat::Binary);
    FAIL("expected a truncation error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("record 2") != std::string::npos);
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
  }
}

TEST_CASE("magic mismatch, bad label, and trailing bytes are rejected") {
  const auto path = temp_file("bad.pds");
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << "NOPE garbage";
  }
  CHECK_THROWS_AS(load_dataset(path, FileFormat::Binary), std::runtime_error);

  const Dataset d = tiny_dataset(2, 40, 6);
  save_dataset(d, path, FileFormat::Binary);
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(16 + 4);  // record 0's label byte
    f.put(static_cast<char>(7));
  }
  try {
    load_dataset(path, FileFormat::Binary);
    FAIL("expected a label error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("record 0") != std::string::npos);
    CHECK(std::string(e.what()).find("label") != std::string::npos);
  }

  save_dataset(d, path, FileFormat::Binary);
  {
    std::ofstream f(path, std::ios::binary | std::ios::app);
    f.put(0);
  }
  CHECK_THROWS_AS(load_dataset(path, FileFormat::Binary), std::runtime_error);
}

TEST_CASE("hand-built csv fixture loads as 3 records of 16 samples") {
  const auto path = temp_file("fixture.csv");
  {
    std::ofstream f(path, std::ios::trunc);
    for (int rec = 0; rec < 3; ++rec) {
      f << rec << ',' << (rec == 0 ? 1 : 0);
      for (int s = 0; s < 16; ++s) f << ',' << (rec * 100 + s);
      f << '\n';
    }
  }
  const Dataset d = load_dataset(path, FileFormat::Csv);
  REQUIRE(d.size() == 3);
  CHECK(d.sample_count() == 16);
  CHECK(d.records[0].label == Label::Pd);
  CHECK(d.records[1].label == Label::NonPd);
  CHECK(d.records[2].label == Label::NonPd);
  CHECK(d.records[2].signal.samples[15] == 215);
}

TEST_CASE("csv with inconsistent sample counts names the offending record") {
  const auto path = temp_file("ragged.csv");
  {
    std::ofstream f(path, std::ios::trunc);
    f << "0,1,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16\n";
    f << "1,0,1,2,3\n";
  }
  try {
    load_dataset(path, FileFormat::Csv);
    FAIL("expected a sample-count error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("record 1") != std::string::npos);
  }
}

TEST_CASE("format detection distinguishes the binary container from csv") {
  const Dataset d = tiny_dataset(2, 24, 8);
  const auto bin = temp_file("detect.pds"), csv = temp_file("detect.csv");
  save_dataset(d, bin, FileFormat::Binary);
  save_dataset(d, csv, FileFormat::Csv);
  CHECK(detect_format(bin) == FileFormat::Binary);
  CHECK(detect_format(csv) == FileFormat::Csv);
}

TEST_CASE("pure sinusoid quantizes to round(A) at the crest") {
  SynthSpec spec;
  spec.sample_count = 4000;
  spec.fundamental_amplitude = 1234.4;
  spec.background_noise_sigma = 0.0;
  const auto result = generate_signal(spec);
  int16_t max_abs = 0;
  for (const int16_t s : result.signal.samples)
    max_abs = std::max<int16_t>(max_abs, static_cast<int16_t>(std::abs(s)));
  CHECK(max_abs == 1234);
  CHECK(result.truth.clipped_samples == 0);
}

TEST_CASE("same spec and seed give identical signals") {
  SynthSpec spec;
  spec.sample_count = 2000;
  spec.background_noise_sigma = 15.0;
  spec.pd_bursts.push_back({0.1, 0.5, 20, 50.0, 200.0});
  spec.seed = 99;
  const auto a = generate_signal(spec);
  const auto b = generate_signal(spec);
  CHECK(a.signal.samples == b.signal.samples);
}

TEST_CASE("burst pulses land inside the window, one sample each") {
  SynthSpec spec;
  spec.sample_count = 1000;
  spec.fundamental_amplitude = 0.0;
  spec.pd_bursts.push_back({0.2, 0.3, 10, 500.0, 500.0});
  spec.seed = 7;
  const auto result = generate_signal(spec);
  size_t pulse_samples = 0;
  for (size_t t = 0; t < spec.sample_count; ++t) {
    if (result.truth.pulses[t] != 0.0) {
      ++pulse_samples;
      CHECK(t >= 200);
      CHECK(t < 300);
      CHECK(std::abs(result.truth.pulses[t]) == doctest::Approx(500.0));
    }
  }
  CHECK(pulse_samples == 10);
}

TEST_CASE("ground truth components sum to the signal before quantization") {
  SynthSpec spec;
  spec.sample_count = 500;
  spec.background_noise_sigma = 8.0;
  spec.pd_bursts.push_back({0.5, 0.9, 15, 90.0, 150.0});
  spec.transient_spikes.push_back({0.25, 4000.0});
  spec.seed = 13;
  const auto result = generate_signal(spec);
  for (size_t t = 0; t < spec.sample_count; ++t) {
    const double v = result.truth.clean[t] + result.truth.noise[t] + result.truth.pulses[t] +
                     result.truth.spikes[t];
    CHECK(std::abs(v - result.signal.samples[t]) <= 0.5);
  }
}

TEST_CASE("clipping is counted when the sum leaves the i16 range") {
  SynthSpec spec;
  spec.sample_count = 100;
  spec.fundamental_amplitude = 40000.0;  // clips near the crests
  const auto result = generate_signal(spec);
  CHECK(result.truth.clipped_samples > 0);
}

TEST_CASE("generate_dataset honors counts, labels, and burst soundness") {
  SynthSpec base;
  base.sample_count = 400;
  base.background_noise_sigma = 10.0;

  const Dataset none = generate_dataset(0, 5, base, 1);
  REQUIRE(none.size() == 5);
  for (const auto& rec : none.records) CHECK(rec.label == Label::NonPd);

  const Dataset balanced = generate_dataset(100, 100, base, 2);
  size_t pd = 0;
  for (const auto& rec : balanced.records) pd += rec.label == Label::Pd;
  CHECK(pd == 100);
  CHECK(balanced.size() == 200);

  // Label soundness: regenerate the ground truth of a non-PD record and
  // check it carries no pulse samples.
  SynthSpec non_pd = base;
  non_pd.seed = 2 ^ 150;  // record 150 of the balanced set is non-PD
  const auto truth = generate_signal(non_pd).truth;
  for (const double p : truth.pulses) CHECK(p == 0.0);
}

TEST_CASE("dataset validation catches duplicates and ragged records") {
  Dataset d = tiny_dataset(3, 32, 21);
  d.records[1].id = d.records[0].id;
  CHECK_THROWS_AS(validate_dataset(d), std::runtime_error);

  Dataset short_rec = tiny_dataset(3, 32, 22);
  short_rec.records[2].signal.samples.pop_back();
  CHECK_THROWS_AS(validate_dataset(short_rec), std::runtime_error);
}
