#pragma once

// Quality-of-transmission estimation for transparent path segments.
//
// SurrogateQot is a closed-form Q-factor model driven by four impairments
// (ASE noise, self-phase modulation, residual chromatic dispersion, PMD) plus
// a spectral-tilt penalty that carries all wavelength dependence:
//
//   n_spans(link)  = ceil(L / span_km)
//   N_span, L_SMF  = sums over the segment's links, H = number of links
//   L_DCF          = L_SMF * |D_smf| / |D_dcf|
//   A              = N_span * 10^(NF_inline/10) + H * 10^(NF_booster/10)
//   OSNR_dB        = osnr_constant + P_in - 10 log10(A)
//   P_SPM          = spm_per_span * N_span
//   residual       = precomp + slope_residual * N_span                [ps/nm]
//   P_CD           = cd_coeff * (residual / cd_tolerance)^2
//   DGD            = sqrt(pmd_smf^2 L_SMF + pmd_dcf^2 L_DCF)           [ps]
//   P_PMD          = pmd_coeff * (DGD / bit_period)^2
//   sections       = ceil(L_SMF / equalizer_km)
//   P_tilt(lambda) = tilt_coeff * ((lambda - lambda_c) / tilt_span)^2 * sections
//   Q_dB           = OSNR_dB - M0 - P_SPM - P_CD - P_PMD - P_tilt
//
// One booster amplifier is charged per traversed link. The constants put the
// transparent reach at the reference wavelength around 2000-2300 km, so every
// single NSF link is admissible while long multi-hop routes are not.
// Evaluation is a fixed left-to-right fold over the links, so results are
// bit-identical for identical inputs.

#include <cmath>
#include <span>
#include <vector>

#include "regenpool/errors.hpp"
#include "regenpool/topology.hpp"

namespace regenpool {

struct TransmissionParams {
  double span_km = 80.0;
  double equalizer_km = 400.0;
  double smf_loss_db_per_km = 0.23;
  double smf_dispersion = 17.0;   // ps/nm/km
  double smf_pmd = 0.1;           // ps/sqrt(km)
  double dcf_dispersion = -90.0;  // ps/nm/km
  double dcf_pmd = 0.08;          // ps/sqrt(km)
  double inline_nf_db = 6.0;
  double booster_nf_db = 5.25;
  double smf_input_power_dbm = -1.0;
  double precompensation = -800.0;  // ps/nm
  double slope_residual = 100.0;    // ps/nm per span
  double bit_rate_gbps = 10.0;
  double q_threshold_db = 15.6;
  double first_wavelength_nm = 1538.97;
  double last_wavelength_nm = 1554.13;
  double reference_wavelength_nm = 1550.0;

  // Surrogate calibration.
  double osnr_constant_db = 58.0;
  double back_to_back_margin_db = 14.0;
  double spm_per_span_db = 0.1;
  double cd_penalty_coeff_db = 2.0;
  double cd_tolerance = 1600.0;  // ps/nm
  double pmd_penalty_coeff_db = 25.0;
  double tilt_coeff_db = 0.25;
  double tilt_span_nm = 11.03;  // largest grid offset from the reference

  double bit_period_ps() const { return 1000.0 / bit_rate_gbps; }
};

// Channel grid lambda_1..lambda_W, evenly spaced between the first and last
// wavelengths. A single-channel grid sits at the first wavelength.
inline std::vector<double> wavelength_grid(const TransmissionParams& p, int w) {
  if (w <= 0) throw ValidationError("wavelength count must be positive");
  std::vector<double> g(static_cast<std::size_t>(w));
  for (int k = 0; k < w; ++k)
    g[k] = w == 1 ? p.first_wavelength_nm
                  : p.first_wavelength_nm + (p.last_wavelength_nm - p.first_wavelength_nm) * k / (w - 1);
  return g;
}

// Upper-triangular table of segment Q values along one path, indexed by
// 0-based link positions m <= n.
class SegmentQMatrix {
 public:
  SegmentQMatrix() = default;
  explicit SegmentQMatrix(int size) : size_(size), q_(static_cast<std::size_t>(size) * (size + 1) / 2) {}

  int size() const noexcept { return size_; }
  std::size_t entry_count() const noexcept { return q_.size(); }
  double at(int m, int n) const { return q_[index(m, n)]; }
  void set(int m, int n, double v) { q_[index(m, n)] = v; }

 private:
  std::size_t index(int m, int n) const {
    if (m < 0 || n >= size_ || m > n) throw Error("segment index out of range");
    // Row m starts after the m previous rows of decreasing length.
    return static_cast<std::size_t>(m) * size_ - static_cast<std::size_t>(m) * (m - 1) / 2 + (n - m);
  }

  int size_ = 0;
  std::vector<double> q_;
};

class QotEstimator {
 public:
  virtual ~QotEstimator() = default;

  // Q factor in dB at the end of the directed walk `links` on `lambda_nm`.
  virtual double q_segment(const Topology& t, std::span<const LinkId> links, double lambda_nm) const = 0;
  virtual const TransmissionParams& params() const = 0;

  double q_threshold() const { return params().q_threshold_db; }
  double reference_wavelength() const { return params().reference_wavelength_nm; }

  SegmentQMatrix q_matrix_for_path(const Topology& t, std::span<const LinkId> path) const {
    if (path.empty()) throw Error("empty path");
    const int h = static_cast<int>(path.size());
    SegmentQMatrix m(h);
    for (int a = 0; a < h; ++a)
      for (int b = a; b < h; ++b)
        m.set(a, b, q_segment(t, path.subspan(a, b - a + 1), reference_wavelength()));
    return m;
  }

  std::vector<double> q_spectrum_for_path(const Topology& t, std::span<const LinkId> path) const {
    if (path.empty()) throw Error("empty path");
    std::vector<double> out;
    for (double lambda : wavelength_grid(params(), t.wavelength_count()))
      out.push_back(q_segment(t, path, lambda));
    return out;
  }
};

class SurrogateQot final : public QotEstimator {
 public:
  SurrogateQot() = default;
  explicit SurrogateQot(TransmissionParams p) : p_(p) {}

  const TransmissionParams& params() const override { return p_; }

  double tilt_penalty(double lambda_nm, int sections) const {
    const double x = (lambda_nm - p_.reference_wavelength_nm) / p_.tilt_span_nm;
    return p_.tilt_coeff_db * x * x * sections;
  }

  double q_segment(const Topology& t, std::span<const LinkId> links, double lambda_nm) const override {
    if (links.empty()) throw Error("q_segment: empty link list");
    long spans = 0;
    double smf_km = 0.0;
    for (std::size_t k = 0; k < links.size(); ++k) {
      const Link& l = t.link(links[k]);
      if (k > 0 && t.link(links[k - 1]).to != l.from)
        throw Error("q_segment: links " + std::to_string(links[k - 1]) + " and " + std::to_string(l.id) +
                    " do not form a connected walk");
      spans += static_cast<long>(std::ceil(l.length_km / p_.span_km));
      smf_km += l.length_km;
    }
    const double n_span = static_cast<double>(spans);
    const double hops = static_cast<double>(links.size());
    const double dcf_km = smf_km * p_.smf_dispersion / -p_.dcf_dispersion;

    const double ase = n_span * std::pow(10.0, p_.inline_nf_db / 10.0) + hops * std::pow(10.0, p_.booster_nf_db / 10.0);
    const double osnr_db = p_.osnr_constant_db + p_.smf_input_power_dbm - 10.0 * std::log10(ase);
    const double spm = p_.spm_per_span_db * n_span;
    const double residual = p_.precompensation + p_.slope_residual * n_span;
    const double cd = p_.cd_penalty_coeff_db * (residual / p_.cd_tolerance) * (residual / p_.cd_tolerance);
    const double dgd = std::sqrt(p_.smf_pmd * p_.smf_pmd * smf_km + p_.dcf_pmd * p_.dcf_pmd * dcf_km);
    const double pmd = p_.pmd_penalty_coeff_db * (dgd / p_.bit_period_ps()) * (dgd / p_.bit_period_ps());
    const int sections = static_cast<int>(std::ceil(smf_km / p_.equalizer_km));

    return osnr_db - p_.back_to_back_margin_db - spm - cd - pmd - tilt_penalty(lambda_nm, sections);
  }

 private:
  TransmissionParams p_;
};

inline bool admissible(double q_db, double threshold_db) { return q_db >= threshold_db; }

}  // namespace regenpool
