/*
   Copyright 2026 The conelab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conelab/geometry.hpp"
#include "conelab/spectral.hpp"

namespace conelab {

// -- catalog -----------------------------------------------------------------

enum class EstimateId
{
    KM_A110,
    KM_A112_J1,
    KM_A112_J2,
    KM_A116,
    L4_2D,
    ANISO_Z1,
    NULL_N2,
    CONC_N4,
    LOWOUT_L1,
    SECTOR_C200,
    SECTOR_E20,
    SECTOR_E21,
    SECTOR_E22,
    SECTOR_K50,
    SECTOR_K52,
    SECTOR_J200,
    SECTOR_J202,
    SECTOR_J220,
};

std::string to_string(EstimateId id);
/// ParseError for unknown names.
EstimateId estimate_id_from_string(const std::string& name);
const std::vector<EstimateId>& all_estimate_ids();
bool is_sector_id(EstimateId id) noexcept;
bool is_product_id(EstimateId id) noexcept; ///< the four KM_* ids

/// Named scalar side parameters. Angles are in radians; "omega" is the
/// polar angle of the direction ω; "I_len" is |I| (|I0| where the estimate
/// restricts the output); "I_center" optionally places the interval.
using Extras = std::map<std::string, double>;

std::vector<std::string> required_extras(EstimateId id);

/// Degree d with predicted(λN, λL, λ·lengths) = λ^d predicted(N, L, lengths).
double homogeneity_degree(EstimateId id) noexcept;

/// Extras keys with the dimension of length; scaled in covariance checks.
bool is_length_extra(const std::string& key) noexcept;

/// Right-hand-side constant of the estimate. DomainError listing the
/// required keys when extras are incomplete.
double predicted_constant(EstimateId id, const DyadicParams& p, const Extras& extras);

// -- empirical constants -----------------------------------------------------

enum class Strategy { Random, Knapp, NullRay, PowerIter, VolumeRoute };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);
/// Strategies producing (near) extremizers rather than generic inputs.
bool is_extremizer(Strategy s) noexcept;
/// DomainError when the strategy cannot test the estimate's hypotheses.
void check_strategy(EstimateId id, Strategy s);

struct RatioReport
{
    EstimateId id = EstimateId::KM_A110;
    DyadicParams params;
    Extras extras;
    double predicted = 0.0;
    double empirical = 0.0;
    double ratio = 0.0;
    Strategy strategy = Strategy::Random;
    std::array<int, 3> dims{0, 0, 0};
    std::uint64_t seed = 0;
    double runtime_ms = 0.0;
};

/// With timing = false runtime_ms is written as 0 so report files are
/// reproducible byte for byte.
nlohmann::json to_json(const RatioReport& r, bool timing = false);

struct EmpiricalOptions
{
    int power_iterations = 8;
    int volume_candidates = 48;
    std::int64_t volume_samples = 20000;
};

RatioReport empirical_constant(EstimateId id, const DyadicParams& p, const Extras& extras, Strategy strategy,
                               std::array<int, 3> dims, std::uint64_t seed, const EmpiricalOptions& opt = {});

/**
 * Alternating power iteration for the discrete bilinear operator
 * (f1, f2) ↦ χ_{A0}(f1 ∗ f2) with f_j supported on A_j ∩ lat. Returns the
 * final quotient ‖χ_{A0}(f1∗f2)‖ / (‖f1‖‖f2‖), a lower bound for the best
 * discrete constant. The quotient sequence (one entry per half step) is
 * appended to history when given; a decrease beyond rounding throws.
 */
double power_iteration_bilinear(const Region& A0, const Region& A1, const Region& A2, const Lattice& lat,
                                int iters, std::uint64_t seed, std::vector<double>* history = nullptr);

// -- pointwise lemma checks --------------------------------------------------

struct AngleLemmaResult
{
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0; ///< +infinity when rhs = 0
    bool second_part_applicable = false;
    double second_part_ratio = 0.0; ///< |h0| / comparison value when applicable
};

/// Domination factor realizing "≪" in the lemma hypotheses.
inline constexpr double kDominationFactor = 0.125;

AngleLemmaResult angle_lemma_check(const FreqPoint& X1, const FreqPoint& X2, Sign s0, Sign s1, Sign s2);

enum class Conic { Ellipse, Hyperbola };

std::string to_string(Conic c);

/// Focal polar radius b²/(a ∓ c cosθ) (minus for the ellipse).
double conic_radius(double a, double c, Conic conic, double theta);

/// |r² + 2ṙ² − r r̈| / (r² + ṙ²)^{3/2} from the closed-form derivatives.
double conic_curvature(double a, double c, Conic conic, double theta);

/// Curvature of the plane curve θ ↦ r(θ)(cosθ, sinθ) by Richardson-extrapolated
/// central differences of the Cartesian parametrization.
double conic_curvature_numeric(double a, double c, Conic conic, double theta);

struct CurvatureResult
{
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    double N1_proxy = 0.0;    ///< geometric mean of the extreme focal radii
    double alpha_proxy = 0.0; ///< smallest θ12 over the admissible samples
    double max_rel_err = 0.0; ///< analytic vs numeric curvature
    int samples = 0;
    bool pass = false;
};

/// Relative agreement required between analytic and numeric curvature.
inline constexpr double kCurvatureRelTol = 1e-6;

/**
 * Samples `samples` angles of theta_range on the conic with foci 0 and
 * (2c, 0), keeps those with θ12 >= alpha, and checks α/N1 <= κ·kappa_tol and
 * κ <= kappa_tol/N1 with the proxies above. The θ12 of a point ξ is the angle
 * between ξ and ξ0 − ξ (ellipse) or ξ − ξ0 (hyperbola).
 */
CurvatureResult curvature_check(double a, double c, Conic conic, Interval theta_range, double alpha,
                                double kappa_tol, int samples = 100);

struct GradientFlowResult
{
    double analytic = 0.0;
    double stated_form = 0.0; ///< (ξ²)²(|ξ0−ξ| ± |ξ|)/(|ξ0−ξ|³|ξ|³); analytic = 2|ξ0|² stated_form
    double numeric = 0.0;
    double rel_err = 0.0;
};

inline constexpr double kGradientFlowRelTol = 1e-6;
/// Difference step relative to the nearer focal distance.
inline constexpr double kGradientFlowStep = 1e-3;
/// rel_err divides by max(|analytic|, kGradientFlowFloor / |ξ0|), so values
/// that vanish on the axis are compared absolutely.
inline constexpr double kGradientFlowFloor = 1e-6;

/// f(ξ) = |ξ| ± |ξ0 − ξ| with + for Sign::Plus (ellipse). Requires ξ0 = (|ξ0|, 0)
/// and distance >= 1e-3 |ξ0| from both foci.
GradientFlowResult gradient_flow_identity(Vec2 xi, Vec2 xi0, Sign s);

// -- sweeps ------------------------------------------------------------------

/// Axis names: N0 N1 N2 L0 L1 L2, the aliases N (all three N) and L12
/// (L1 = L2), or any extras key.
struct SweepAxis
{
    std::string name;
    std::vector<double> values;
};

struct SweepSpec
{
    EstimateId id = EstimateId::KM_A110;
    DyadicParams base;
    Extras extras;
    std::vector<SweepAxis> axes;
    std::vector<std::array<Sign, 3>> sign_patterns; ///< empty means base.signs only
    Strategy strategy = Strategy::Random;
    std::array<int, 3> dims{64, 64, 64};
    std::uint64_t seed = 42;
};

inline constexpr std::size_t kMaxSweepConfigs = 10000;

/// Cartesian product in spec order (sign pattern outermost, last axis fastest).
/// BudgetError beyond kMaxSweepConfigs; DomainError for empty or non-dyadic axes.
std::vector<std::pair<DyadicParams, Extras>> expand_sweep(const SweepSpec& spec);

struct SlopeFit
{
    std::string parameter;
    double slope = 0.0; ///< mean over groups
    double slope_min = 0.0;
    double slope_max = 0.0;
    int groups = 0;
};

struct SweepResult
{
    std::vector<RatioReport> reports;
    std::vector<SlopeFit> fits;
    double max_ratio = 0.0;
    std::optional<double> min_sharp_ratio;
    bool complete = true;
    std::string error; ///< first member failure, in spec order
};

/// Least-squares slope of log y against log x for each swept axis, over
/// groups of reports that agree on every other axis and sign pattern.
std::vector<SlopeFit> fit_slopes(const SweepSpec& spec, const std::vector<RatioReport>& reports);

SweepResult sweep(const SweepSpec& spec, const EmpiricalOptions& opt = {});

SweepSpec sweep_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepSpec& s);
nlohmann::json to_json(const SlopeFit& f);
nlohmann::json summary_json(const SweepResult& r);

/// CSV with the fixed column order id, N0..L2, sign0..sign2, extras (sorted
/// union of keys), predicted, empirical, ratio, strategy, dims, seed, runtime_ms.
void write_reports_csv(std::ostream& out, const std::vector<RatioReport>& reports, bool timing = false);

/// Shortest round-trip decimal form used by every report writer.
std::string format_real(double v);

} // namespace conelab
