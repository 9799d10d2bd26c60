#include "codesign/timeseries.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "codesign/constants.hpp"
#include "codesign/util.hpp"

namespace codesign {

namespace {

constexpr double kSpacingTolHours = 1e-6;

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw std::invalid_argument(context + ": " + what);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& raw, const std::string& context, std::size_t row) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) fail(context, "row " + std::to_string(row) + ": invalid numeric '" + raw + "'");
  if (std::isnan(v)) fail(context, "row " + std::to_string(row) + ": NaN value");
  return v;
}

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
long long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return static_cast<long long>(era) * 146097LL + static_cast<long long>(doe) - 719468LL;
}

// Timestamp field: plain hour offset, or ISO-8601 "YYYY-MM-DD[ T]HH:MM[:SS]"
// converted to absolute hours (rebased to the first row by the caller).
double parse_timestamp(const std::string& raw, const std::string& context, std::size_t row,
                       bool* is_iso) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin && *end == '\0') {
    *is_iso = false;
    if (std::isnan(v)) fail(context, "row " + std::to_string(row) + ": NaN timestamp");
    return v;
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const int got = std::sscanf(raw.c_str(), "%d-%d-%d%*1[T ]%d:%d:%d", &y, &mo, &d, &h, &mi, &s);
  if (got < 5 || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60)
    fail(context, "row " + std::to_string(row) + ": invalid timestamp '" + raw + "'");
  *is_iso = true;
  return static_cast<double>(days_from_civil(y, mo, d)) * 24.0 + h + mi / 60.0 + s / 3600.0;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ExogenousSeries::validate() const {
  const std::string ctx = origin.empty() ? std::string("series") : origin;
  if (samples.empty()) fail(ctx, "empty series");
  if (!(resolution_min > 0.0)) fail(ctx, "non-positive resolution");
  const double res_h = resolution_hours();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (std::isnan(s.t) || std::isnan(s.T_e) || std::isnan(s.I) || std::isnan(s.c_el) ||
        std::isnan(s.c_em))
      fail(ctx, "row " + std::to_string(i) + ": NaN value");
    if (s.I < 0.0) fail(ctx, "row " + std::to_string(i) + ": negative irradiance");
    if (s.c_em < 0.0) fail(ctx, "row " + std::to_string(i) + ": negative carbon intensity");
    if (i > 0) {
      const double dt = s.t - samples[i - 1].t;
      if (dt <= 0.0) fail(ctx, "non-monotone timestamps at row " + std::to_string(i));
      if (std::fabs(dt - res_h) > kSpacingTolHours)
        fail(ctx, "resolution mismatch at row " + std::to_string(i) + ": spacing " +
                      format_double(dt * 60.0) + " min, declared " + format_double(resolution_min));
    }
  }
}

ExogenousSeries load_series(std::istream& in, double resolution_min, const std::string& name) {
  if (!(resolution_min > 0.0)) fail(name, "non-positive resolution");
  std::string line;
  if (!std::getline(in, line)) fail(name, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_csv_line(line);
  const std::vector<std::string> required = {"t", "T_e", "I", "c_el", "c_em"};
  std::vector<std::size_t> col(required.size(), header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    for (std::size_t r = 0; r < required.size(); ++r) {
      if (header[c] == required[r]) col[r] = c;
    }
  }
  for (std::size_t r = 0; r < required.size(); ++r) {
    if (col[r] == header.size()) fail(name, "missing column '" + required[r] + "'");
  }

  ExogenousSeries series;
  series.resolution_min = resolution_min;
  series.origin = name;
  std::size_t row = 0;
  bool iso_times = false;
  double t0 = 0.0;
  std::string first_stamp;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < header.size())
      fail(name, "row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                     " fields, got " + std::to_string(fields.size()));
    ExogenousSample s;
    bool is_iso = false;
    s.t = parse_timestamp(fields[col[0]], name, row, &is_iso);
    if (row == 0) {
      iso_times = is_iso;
      t0 = s.t;
      first_stamp = fields[col[0]];
    } else if (is_iso != iso_times) {
      fail(name, "row " + std::to_string(row) + ": mixed timestamp styles");
    }
    if (iso_times) s.t -= t0;  // rebase calendar stamps to hours from origin
    s.T_e = parse_number(fields[col[1]], name, row);
    s.I = parse_number(fields[col[2]], name, row);
    s.c_el = parse_number(fields[col[3]], name, row);
    s.c_em = parse_number(fields[col[4]], name, row);
    series.samples.push_back(s);
    ++row;
  }
  if (iso_times) series.origin = name + " @ " + first_stamp;
  series.validate();
  return series;
}

ExogenousSeries load_series(const std::string& path, double resolution_min) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  return load_series(in, resolution_min, path);
}

void write_series_csv(const ExogenousSeries& series, std::ostream& out) {
  out << "t,T_e,I,c_el,c_em\n";
  for (const auto& s : series.samples) {
    out << format_double(s.t) << ',' << format_double(s.T_e) << ',' << format_double(s.I) << ','
        << format_double(s.c_el) << ',' << format_double(s.c_em) << '\n';
  }
}

void write_series_csv(const ExogenousSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  write_series_csv(series, out);
}

// Synthetic signals, closed form (tau = t + season_phase_hours, hod = t mod 24):
//   T_e(t)  = temp_mean + A_yr sin(2 pi tau/8760) + A_day sin(2 pi (hod-9)/24)
//             + noise_T * u_T(i),            u_* in [-1,1), counter-indexed
//   I(t)    = max(0, peak * sin(pi (hod-rise)/(set-rise)) * season(tau)
//             * (1 + noise_I * u_I(i)))      inside [rise,set), else exactly 0
//             with season(tau) = 1 + seasonal_amp sin(2 pi tau/8760)
//   c_el(t) = max(floor, mean + spread * ((1-w) shape(hod_b) + w u_P(b)))
//             with shape(h) = sin(2 pi (h-13)/24), b the delta_T block index
//   c_em(t) = max(0, mean_em + amp_em sin(2 pi (hod_b-14)/24))
ExogenousSeries synthesize(const SynthConfig& cfg, std::uint64_t seed) {
  if (!(cfg.span_hours > 0.0)) fail("synthesize", "zero-length span");
  if (!(cfg.resolution_min > 0.0)) fail("synthesize", "non-positive resolution");
  if (cfg.temp_annual_amp_c < 0 || cfg.temp_diurnal_amp_c < 0 || cfg.temp_noise_c < 0 ||
      cfg.irradiance_peak_w_m2 < 0 || cfg.irradiance_noise < 0 || cfg.price_spread < 0 ||
      cfg.carbon_amp < 0 || cfg.irradiance_seasonal_amp < 0)
    fail("synthesize", "negative amplitudes");
  if (!(cfg.daylight_end_hour > cfg.daylight_start_hour))
    fail("synthesize", "daylight window must have positive length");
  if (!(cfg.price_block_min > 0.0)) fail("synthesize", "non-positive price block length");

  const double res_h = cfg.resolution_min / 60.0;
  const auto n = static_cast<std::size_t>(std::llround(cfg.span_hours / res_h));
  if (n == 0) fail("synthesize", "zero-length span");

  const SeededRng rng_temp(derive_seed(seed, "synth.temp"));
  const SeededRng rng_irr(derive_seed(seed, "synth.irradiance"));
  const SeededRng rng_price(derive_seed(seed, "synth.price"));

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double block_h = cfg.price_block_min / 60.0;

  ExogenousSeries series;
  series.resolution_min = cfg.resolution_min;
  series.origin = cfg.origin;
  series.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * res_h;
    const double tau = t + cfg.season_phase_hours;
    const double hod = std::fmod(t, 24.0);

    ExogenousSample s;
    s.t = t;
    s.T_e = cfg.temp_mean_c + cfg.temp_annual_amp_c * std::sin(two_pi * tau / kHoursPerYear) +
            cfg.temp_diurnal_amp_c * std::sin(two_pi * (hod - 9.0) / 24.0) +
            cfg.temp_noise_c * rng_temp.symmetric(i);

    if (hod >= cfg.daylight_start_hour && hod < cfg.daylight_end_hour) {
      const double frac = (hod - cfg.daylight_start_hour) /
                          (cfg.daylight_end_hour - cfg.daylight_start_hour);
      const double season = 1.0 + cfg.irradiance_seasonal_amp * std::sin(two_pi * tau / kHoursPerYear);
      const double bump = cfg.irradiance_peak_w_m2 * std::sin(std::numbers::pi * frac) * season;
      s.I = std::max(0.0, bump * (1.0 + cfg.irradiance_noise * rng_irr.symmetric(i)));
    } else {
      s.I = 0.0;
    }

    const auto block = static_cast<std::uint64_t>(std::floor(t / block_h + 1e-9));
    const double hod_b = std::fmod(static_cast<double>(block) * block_h, 24.0);
    const double shape = std::sin(two_pi * (hod_b - 13.0) / 24.0);
    const double noise = rng_price.symmetric(block);
    s.c_el = std::max(cfg.price_floor,
                      cfg.price_mean + cfg.price_spread * ((1.0 - cfg.price_noise_weight) * shape +
                                                           cfg.price_noise_weight * noise));
    s.c_em = std::max(0.0, cfg.carbon_mean + cfg.carbon_amp * std::sin(two_pi * (hod_b - 14.0) / 24.0));
    series.samples.push_back(s);
  }
  series.validate();
  return series;
}

ExogenousSeries resample(const ExogenousSeries& series, double target_min) {
  series.validate();
  if (!(target_min > 0.0)) fail(series.origin, "non-positive target resolution");
  const double ratio_refine = series.resolution_min / target_min;
  const double ratio_coarsen = target_min / series.resolution_min;

  ExogenousSeries out;
  out.resolution_min = target_min;
  out.origin = series.origin;
  const double t0 = series.samples.front().t;
  const double target_h = target_min / 60.0;

  const auto near_integer = [](double x) {
    return x >= 1.0 - 1e-9 && std::fabs(x - std::llround(x)) < 1e-9;
  };

  if (std::fabs(ratio_refine - 1.0) < 1e-12) {
    out = series;
    return out;
  }

  if (near_integer(ratio_refine)) {
    // Refining: f output samples per input sample, span preserved.
    const auto f = static_cast<std::size_t>(std::llround(ratio_refine));
    const std::size_t n = series.size();
    out.samples.reserve(n * f);
    for (std::size_t j = 0; j < n * f; ++j) {
      const std::size_t k = j / f;
      const double u = static_cast<double>(j % f) / static_cast<double>(f);
      const auto& a = series.samples[k];
      const ExogenousSample& b = (k + 1 < n) ? series.samples[k + 1] : a;
      ExogenousSample s;
      s.t = t0 + static_cast<double>(j) * target_h;
      s.T_e = (1.0 - u) * a.T_e + u * b.T_e;
      s.I = (1.0 - u) * a.I + u * b.I;
      s.c_el = a.c_el;  // zero-order hold
      s.c_em = a.c_em;
      out.samples.push_back(s);
    }
  } else if (near_integer(ratio_coarsen)) {
    // Coarsening: block means for weather, block-start hold for prices.
    const auto f = static_cast<std::size_t>(std::llround(ratio_coarsen));
    const std::size_t m = series.size() / f;
    if (m == 0) fail(series.origin, "series shorter than one coarse sample");
    out.samples.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
      double te = 0.0, irr = 0.0;
      for (std::size_t i = j * f; i < (j + 1) * f; ++i) {
        te += series.samples[i].T_e;
        irr += series.samples[i].I;
      }
      ExogenousSample s;
      s.t = t0 + static_cast<double>(j) * target_h;
      s.T_e = te / static_cast<double>(f);
      s.I = irr / static_cast<double>(f);
      s.c_el = series.samples[j * f].c_el;
      s.c_em = series.samples[j * f].c_em;
      out.samples.push_back(s);
    }
  } else {
    fail(series.origin, "incompatible resolutions: " + format_double(series.resolution_min) +
                            " min -> " + format_double(target_min) + " min");
  }
  return out;
}

std::vector<Subsample> split_subsamples(const ExogenousSeries& series, double sim_hours,
                                        std::size_t horizon_steps, double stride_hours) {
  series.validate();
  const double res_h = series.resolution_hours();
  if (!(stride_hours > 0.0)) fail(series.origin, "non-positive stride");
  const double horizon_hours = static_cast<double>(horizon_steps) * res_h;
  if (sim_hours < 2.0 * horizon_hours - 1e-9)
    fail(series.origin, "subsample span must be at least twice the prediction horizon");

  const auto to_steps = [&](double hours, const char* what) {
    const double steps = hours / res_h;
    if (std::fabs(steps - std::llround(steps)) > 1e-9 || std::llround(steps) < 1)
      fail(series.origin, std::string(what) + " is not a positive multiple of the resolution");
    return static_cast<std::size_t>(std::llround(steps));
  };
  const std::size_t sim_samples = to_steps(sim_hours, "sim length");
  const std::size_t stride_samples = to_steps(stride_hours, "stride");
  const std::size_t need = sim_samples + horizon_steps;
  if (need > series.size()) fail(series.origin, "series shorter than one subsample");

  std::vector<Subsample> subs;
  for (std::size_t start = 0; start + need <= series.size(); start += stride_samples) {
    Subsample sub;
    sub.parent_id = series.origin;
    sub.start_index = start;
    sub.sim_samples = sim_samples;
    sub.pad_samples = horizon_steps;
    sub.weight = kHoursPerYear / sim_hours;
    subs.push_back(sub);
  }
  return subs;
}

ExogenousSeries slice(const ExogenousSeries& series, const Subsample& sub) {
  if (sub.start_index + sub.total_samples() > series.size())
    fail(series.origin, "subsample exceeds parent series");
  ExogenousSeries out;
  out.resolution_min = series.resolution_min;
  out.origin = sub.parent_id + "[" + std::to_string(sub.start_index) + "]";
  out.samples.assign(series.samples.begin() + static_cast<std::ptrdiff_t>(sub.start_index),
                     series.samples.begin() +
                         static_cast<std::ptrdiff_t>(sub.start_index + sub.total_samples()));
  return out;
}

}  // namespace codesign
