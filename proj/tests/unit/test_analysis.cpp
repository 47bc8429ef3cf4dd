#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "vt25d/analysis.hpp"
#include "vt25d/error.hpp"

using namespace vt25;

namespace {

struct Curve {
  std::vector<double> f, db;
};

// Sum of Lorentzian power peaks, sampled at df.
Curve lorentzians(const std::vector<double>& centres, double gamma, double df, double f_end) {
  Curve c;
  for (double f = 0.0; f <= f_end; f += df) {
    double power = 1e-6;
    for (double fc : centres) power += 1.0 / (1.0 + ((f - fc) / gamma) * ((f - fc) / gamma));
    c.f.push_back(f);
    c.db.push_back(10.0 * std::log10(power));
  }
  return c;
}

FormantSet set_of(std::vector<double> f) {
  FormantSet s;
  s.frequencies = std::move(f);
  s.magnitudes_db.assign(s.frequencies.size(), 0.0);
  return s;
}

}  // namespace

TEST_CASE("transfer_function of a pure 1 kHz tone") {
  const double rate = 661500.0;
  const std::size_t pad = std::size_t{1} << 21;
  std::vector<double> x(33075);
  for (std::size_t n = 0; n < x.size(); ++n) {
    x[n] = std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(n) / rate);
  }
  const TransferFunction tf = transfer_function(x, rate, pad);
  CHECK(tf.resolution == doctest::Approx(0.3155).epsilon(1e-4));
  CHECK(tf.resolution == rate / static_cast<double>(pad));
  CHECK(tf.source_rate == rate);
  CHECK(tf.freqs.size() == pad / 2 + 1);
  CHECK(tf.freqs.front() == 0.0);
  CHECK(tf.freqs.back() == doctest::Approx(rate / 2.0));

  const auto top = std::max_element(tf.magnitude_db.begin(), tf.magnitude_db.end());
  const double f_top = tf.freqs[static_cast<std::size_t>(top - tf.magnitude_db.begin())];
  CHECK(std::abs(f_top - 1000.0) <= tf.resolution / 2.0);

  const FormantSet one = find_formants(tf, 1, 50.0, 10000.0);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one.frequencies[0] - 1000.0) <= tf.resolution / 2.0);
}

TEST_CASE("transfer_function of silence is the dB floor") {
  const TransferFunction tf = transfer_function(std::vector<double>(100, 0.0), 1000.0, 128);
  for (double v : tf.magnitude_db) CHECK(v == kDbFloor);
  CHECK(kDbFloor == -300.0);
}

TEST_CASE("power spectrum satisfies Parseval") {
  std::vector<double> x(1000);
  for (std::size_t n = 0; n < x.size(); ++n) {
    x[n] = std::exp(-0.004 * n) * std::sin(0.05 * n * n / 100.0) + 0.01 * std::cos(1.3 * n);
  }
  const std::size_t N = 4096;
  const std::vector<double> p = power_spectrum(x, N);
  REQUIRE(p.size() == N / 2 + 1);
  double time_energy = 0.0;
  for (double v : x) time_energy += v * v;
  double spec = p.front() + p.back();
  for (std::size_t k = 1; k + 1 < p.size(); ++k) spec += 2.0 * p[k];
  spec /= static_cast<double>(N);
  CHECK(std::abs(spec - time_energy) / time_energy <= 1e-9);
}

TEST_CASE("transfer_function errors") {
  const std::vector<double> x(100, 1.0);
  CHECK_THROWS_AS(transfer_function(std::vector<double>{}, 1000.0, 128), ValidationError);
  CHECK_THROWS_AS(transfer_function(x, 1000.0, 100), ValidationError);
  CHECK_THROWS_AS(transfer_function(x, 1000.0, 64), ValidationError);
  CHECK_THROWS_AS(transfer_function(x, 0.0, 128), ValidationError);
  CHECK(is_power_of_two(1));
  CHECK(is_power_of_two(std::size_t{1} << 21));
  CHECK_FALSE(is_power_of_two(0));
  CHECK_FALSE(is_power_of_two(96));
}

TEST_CASE("deconvolution divides out the excitation spectrum") {
  std::vector<double> u(64);
  for (std::size_t n = 0; n < u.size(); ++n) u[n] = std::exp(-0.1 * n);
  std::vector<double> y(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) y[n] = 3.0 * u[n];
  const std::span<const double> us(u);
  const TransferFunction tf = transfer_function(y, 1000.0, 256, us);
  for (double v : tf.magnitude_db) CHECK(v == doctest::Approx(20.0 * std::log10(3.0)));
}

TEST_CASE("find_peaks on Lorentzian peaks") {
  const double df = 0.7;
  const Curve c = lorentzians({500.0, 1500.0, 2500.0}, 40.0, df, 4000.0);
  const FormantSet f = find_peaks(c.f, c.db, 3, 50.0, 3500.0);
  REQUIRE(f.size() == 3);
  CHECK_FALSE(f.shortfall);
  CHECK(std::abs(f.frequencies[0] - 500.0) <= df);
  CHECK(std::abs(f.frequencies[1] - 1500.0) <= df);
  CHECK(std::abs(f.frequencies[2] - 2500.0) <= df);
  for (std::size_t k = 0; k + 1 < f.size(); ++k) CHECK(f.frequencies[k] < f.frequencies[k + 1]);

  SUBCASE("only the lowest n are returned") {
    const FormantSet two = find_peaks(c.f, c.db, 2, 50.0, 3500.0);
    REQUIRE(two.size() == 2);
    CHECK(two.frequencies[1] == f.frequencies[1]);
  }
  SUBCASE("asking for more gives a shortfall") {
    const FormantSet five = find_peaks(c.f, c.db, 5, 50.0, 3500.0);
    CHECK(five.size() == 3);
    CHECK(five.shortfall);
  }
  SUBCASE("uniform dB offset does not move peaks") {
    std::vector<double> shifted = c.db;
    for (double& v : shifted) v += 37.5;
    const FormantSet g = find_peaks(c.f, shifted, 3, 50.0, 3500.0);
    REQUIRE(g.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(g.frequencies[k] == doctest::Approx(f.frequencies[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("parabolic refinement stays within one bin of the raw maximum") {
  const double df = 1.3;
  Curve c = lorentzians({310.0, 777.7, 1234.5, 2001.1, 3333.3}, 25.0, df, 4000.0);
  for (std::size_t k = 0; k < c.db.size(); ++k) c.db[k] += 0.2 * std::sin(0.37 * k);
  const FormantSet f = find_peaks(c.f, c.db, 10, 50.0, 3900.0);
  CHECK(f.size() >= 5);
  for (double fr : f.frequencies) {
    // nearest sampled local maximum
    const auto k = static_cast<std::size_t>(std::lround(fr / df));
    double best = 1e300;
    for (std::size_t m = k - 1; m <= k + 1; ++m) {
      if (c.db[m] > c.db[m - 1] && c.db[m] >= c.db[m + 1]) best = std::min(best, std::abs(fr - c.f[m]));
    }
    CHECK(best <= df);
  }
}

TEST_CASE("monotone spectrum has no formants") {
  std::vector<double> f, db;
  for (int k = 0; k < 1000; ++k) {
    f.push_back(k * 10.0);
    db.push_back(-0.01 * k);
  }
  const FormantSet s = find_peaks(f, db, 4, 50.0, 9000.0);
  CHECK(s.size() == 0);
  CHECK(s.shortfall);
}

TEST_CASE("find_peaks rejects weak ripples and bad arguments") {
  std::vector<double> f, db;
  for (int k = 0; k < 2000; ++k) {
    f.push_back(k * 1.0);
    db.push_back(1.0 * std::sin(k * 0.05));  // 2 dB peak to trough
  }
  CHECK(find_peaks(f, db, 3, 10.0, 1900.0).size() == 0);
  CHECK_THROWS_AS(find_peaks(f, db, 0, 10.0, 1900.0), ValidationError);
  CHECK_THROWS_AS(find_peaks(f, db, 1, 500.0, 500.0), ValidationError);
  CHECK_THROWS_AS(find_peaks(f, db, 1, 500.2, 500.8), ValidationError);

  const TransferFunction tf = transfer_function(std::vector<double>(10, 1.0), 1000.0, 16);
  CHECK_THROWS_AS(find_formants(tf, 1, 10.0, 600.0), ValidationError);
}

TEST_CASE("compare_formants") {
  const FormantComparison c = compare_formants(set_of({704.0}), set_of({700.0}));
  REQUIRE(c.rows.size() == 1);
  CHECK(c.rows[0].delta_hz == doctest::Approx(4.0));
  CHECK(c.rows[0].delta_percent == doctest::Approx(0.5714).epsilon(1e-3));

  const FormantComparison same = compare_formants(set_of({500, 1500}), set_of({500, 1500}));
  for (const auto& r : same.rows) {
    CHECK(r.delta_hz == 0.0);
    CHECK(r.delta_percent == 0.0);
  }
  CHECK_THROWS_AS(compare_formants(set_of({500}), set_of({500, 1500})), ValidationError);

  const FormantSet a = set_of({512.0, 1490.0, 2533.0});
  const FormantSet b = set_of({500.0, 1500.0, 2500.0});
  const FormantComparison ab = compare_formants(a, b);
  const FormantComparison ba = compare_formants(b, a);
  for (std::size_t k = 0; k < 3; ++k) CHECK(ab.rows[k].delta_hz == -ba.rows[k].delta_hz);

  const std::string table = format_comparison_table(c, "F1 check");
  CHECK(table.find("F1 check") != std::string::npos);
  CHECK(table.find("+4.0 Hz") != std::string::npos);
  CHECK(table.find("+0.57 %") != std::string::npos);

  const auto j = nlohmann::json::parse(comparison_json(c));
  CHECK(j["formants"][0]["delta_hz"].get<double>() == doctest::Approx(4.0));
  CHECK(j["formants"][0]["index"].get<int>() == 1);
}

TEST_CASE("transfer CSV and formant JSON") {
  std::ostringstream out;
  write_transfer_csv(out, std::vector<double>{0.0, 0.5}, std::vector<double>{-3.0, 1.25});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "freq_hz,magnitude_db");
  std::getline(in, line);
  CHECK(line == "0.000000,-3");

  FormantSet s = set_of({500.5, 1501.25});
  s.shortfall = true;
  const auto j = nlohmann::json::parse(formants_json(s));
  CHECK(j["shortfall"].get<bool>());
}
