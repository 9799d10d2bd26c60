#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace codesign {

// One reading of the exogenous vector w(t) = [T_e, I, c_el, c_em].
struct ExogenousSample {
  double t = 0.0;     // hours from series origin
  double T_e = 0.0;   // external temperature, degC
  double I = 0.0;     // solar irradiance, W/m2
  double c_el = 0.0;  // electricity price, GBP/kWh
  double c_em = 0.0;  // grid carbon intensity, kgCO2e/kWh
};

// Uniformly spaced, strictly ordered series of exogenous samples.
struct ExogenousSeries {
  std::vector<ExogenousSample> samples;
  double resolution_min = 0.0;  // spacing between samples, minutes
  std::string origin;           // calendar label of sample 0, informational

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double resolution_hours() const { return resolution_min / 60.0; }
  // Wall-clock span covered, counting the trailing hold interval.
  double span_hours() const { return static_cast<double>(samples.size()) * resolution_hours(); }
  const ExogenousSample& at(std::size_t i) const { return samples[i]; }

  // Throws std::invalid_argument on any invariant violation (spacing, order,
  // NaN, negative irradiance or carbon intensity).
  void validate() const;
};

// Window of a parent series used as one scenario piece: N_h simulation steps
// plus N-1 steps of horizon padding so the final MPC solve still sees a full
// forecast. The weight R_h annualises the operational cost of the window.
struct Subsample {
  std::string parent_id;
  std::size_t start_index = 0;
  std::size_t sim_samples = 0;  // N_h, in parent-resolution steps
  std::size_t pad_samples = 0;  // N - 1, in parent-resolution steps
  double weight = 0.0;          // R_h = 8760 h / simulated hours

  std::size_t total_samples() const { return sim_samples + pad_samples; }
};

// Closed-form synthetic scenario generator. Every signal is a documented
// function of time and of a counter-based seeded noise stream, so tests can
// recompute expected values independently.
struct SynthConfig {
  double span_hours = 24.0 * 7;
  double resolution_min = 15.0;
  std::string origin = "synthetic";

  // External temperature: mean + annual + diurnal sinusoids + uniform noise.
  double temp_mean_c = 10.0;
  double temp_annual_amp_c = 8.0;
  double temp_diurnal_amp_c = 4.0;
  double temp_noise_c = 0.5;

  // Irradiance: half-sine bump inside the daylight window, scaled by an
  // annual season factor, zero outside; multiplicative noise, clamped >= 0.
  double irradiance_peak_w_m2 = 600.0;
  double irradiance_seasonal_amp = 0.5;  // relative annual modulation in [0,1)
  double daylight_start_hour = 8.0;
  double daylight_end_hour = 16.0;
  double irradiance_noise = 0.1;  // relative

  // Price: piecewise constant per delta_T block; diurnal double-peak shape
  // plus uniform noise, floored.
  double price_mean = 0.20;        // GBP/kWh
  double price_spread = 0.10;      // GBP/kWh amplitude of shape + noise
  double price_block_min = 15.0;   // delta_T, minutes
  double price_floor = 0.01;       // GBP/kWh
  double price_noise_weight = 0.3; // fraction of spread assigned to noise

  // Carbon intensity: diurnal sinusoid, blocked like the price, clamped >= 0.
  double carbon_mean = 0.20;  // kg/kWh
  double carbon_amp = 0.08;

  // Annual phase offset, hours: lets one config family produce distinct
  // "years" by shifting the seasonal alignment.
  double season_phase_hours = 0.0;
};

// Parses a CSV file with header t,T_e,I,c_el,c_em into a validated series.
// `t` accepts hour offsets; rows must be uniformly spaced at `resolution_min`.
ExogenousSeries load_series(const std::string& path, double resolution_min);

// Same parser over an already-open stream (unit-test seam).
ExogenousSeries load_series(std::istream& in, double resolution_min, const std::string& name);

void write_series_csv(const ExogenousSeries& series, const std::string& path);
void write_series_csv(const ExogenousSeries& series, std::ostream& out);

ExogenousSeries synthesize(const SynthConfig& cfg, std::uint64_t seed);

// Changes sample spacing. Prices and carbon intensity are held (zero-order);
// temperature and irradiance are linearly interpolated when refining and
// block-averaged when coarsening. The target must divide or be a multiple of
// the source resolution.
ExogenousSeries resample(const ExogenousSeries& series, double target_min);

// Cuts the series into simulation windows of `sim_hours`, each padded by
// `horizon_steps` parent-resolution samples, advancing by `stride_hours`.
// Trailing remainders that cannot fill a full window are dropped.
std::vector<Subsample> split_subsamples(const ExogenousSeries& series, double sim_hours,
                                        std::size_t horizon_steps, double stride_hours);

// Materialises the window a subsample refers to (including padding).
ExogenousSeries slice(const ExogenousSeries& series, const Subsample& sub);

}  // namespace codesign
