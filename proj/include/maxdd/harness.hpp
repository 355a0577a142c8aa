#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maxdd/coarse_economical.hpp"
#include "maxdd/coarse_spectral.hpp"
#include "maxdd/decomposition.hpp"
#include "maxdd/nedelec.hpp"
#include "maxdd/preconditioner.hpp"

namespace maxdd {

enum class Method { None, Wasi, Spectral, Economical, Grid };
enum class CaseKind { Manufactured, Dipole };

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct ExperimentConfig {
  double kappa = 6.283185307179586;
  std::string epsilon_rule = "kappa";  // zero | kappa | kappa2 | <number>
  double gamma = 0.5;    // h = kappa^{-(1+gamma)}
  double n_ppw = 0.0;    // > 0: h = (2 pi / kappa) / n_ppw instead
  int mesh_n = 0;        // > 0: explicit cells per axis
  int parts = 0;         // 0: round(kappa^beta)
  double alpha = -1.0;   // < 0: derived from epsilon = kappa^{1+alpha}
  double beta = 0.6;
  std::string overlap = "generous";  // minimal | generous | <layers>
  Method method = Method::Spectral;
  double rho = 0.0;  // > 0: fixed tolerance
  double C0 = 1.0;
  int mu = 0;  // 0: round(kappa^{1-beta/2})
  double tol = 1e-6;
  int maxit = 1000;
  bool weighted = false;
  bool right_precond = false;
  CaseKind case_kind = CaseKind::Manufactured;
  std::uint64_t seed = 1;
  int fov_samples = 0;
  bool write_vtk = false;
  bool write_matrices = false;
  bool dump_spectra = false;
  std::string out_dir;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// "key = value" lines; '#' starts a comment.
KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);
/// Applies one key; throws ConfigError on unknown keys or bad values.
void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);
ExperimentConfig config_from(const KeyValues& kv);
/// Cartesian product over comma-separated values, in file order.
std::vector<ExperimentConfig> expand_sweep(const KeyValues& kv);

/// Derived quantities of a configuration.
struct ResolvedConfig {
  int n = 0;
  double spacing = 0.0;  // 1/n
  int parts = 1;
  int overlap_layers = 1;
  double epsilon = 0.0;
  double alpha = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  int mu = 0;
};

ResolvedConfig resolve(const ExperimentConfig& cfg);
double epsilon_from_rule(const std::string& rule, double kappa);

/// Closed-form data of the manufactured solution.
struct ManufacturedCase {
  double kappa = 1.0;
  double epsilon = 0.0;
  CVec3 E(const Vec3& x) const;
  CVec3 curl_E(const Vec3& x) const;
  CVec3 curl_curl_E(const Vec3& x) const;
  /// curl curl E - (kappa^2 + i eps) E
  CVec3 J(const Vec3& x) const;
  /// (curl E) x n - i kappa E_T
  CVec3 g(const Vec3& x, const Vec3& n) const;
  FieldSource source() const;
};

ManufacturedCase manufactured_case(double kappa, double epsilon = 0.0);

struct DipoleCase {
  DipoleSource source;
  std::vector<cplx> rel_permittivity;  // per cell
  std::array<double, 3> interfaces{};  // snapped z of the 0.5, 0.2, 0.025 planes
  std::vector<std::string> notes;
};

/// Layered medium with a point dipole at (0.5, 0.5, 0.8), a = (1, 0, 0).
DipoleCase dipole_case(const BoxMesh& mesh);

/// Relative permittivity of the layered medium at height z for the given
/// interface heights (top to bottom).
cplx layered_permittivity(double z, const std::array<double, 3>& interfaces);

struct CoarseOptions {
  Method method = Method::Spectral;
  double rho = 0.5;
  int mu = 1;
  bool keep_spectra = false;
};

struct PreconditionerBuild {
  std::unique_ptr<SchwarzPreconditioner> precond;
  std::vector<SpectralSelection> spectra;  // spectral method with keep_spectra
  std::vector<int> m_l;                    // Gamma_l edge counts
  int candidates = 0;
};

PreconditionerBuild build_preconditioner(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                                         const Decomposition& dec, const ProblemParams& params,
                                         const ComplexSparseMatrix& A, const CoarseOptions& opts);

struct RunReport {
  ExperimentConfig config;
  ResolvedConfig resolved;
  int n_dofs = 0;
  int iterations = 0;
  bool converged = false;
  int coarse_dim = 0;
  int max_local_dofs = 0;
  std::vector<double> history;
  std::optional<double> error_imp;
  std::optional<FovDiagnostics> fov;
  std::vector<int> local_dofs;
  std::vector<int> local_m;
  std::map<std::string, double> timings;
  std::vector<std::string> notes;
  double wall_time = 0.0;
  CVector solution;
};

RunReport run_experiment(const ExperimentConfig& cfg);

/// Writes report.json and table.csv to cfg.out_dir. Optional artifacts
/// (solution.vtk, Matrix Market dumps) are written by run_experiment.
void write_run_outputs(const RunReport& report);

struct SweepRow {
  ExperimentConfig config;
  std::optional<RunReport> report;
  std::string error;
};

/// Runs each configuration; failures are recorded per row.
std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs);
/// table.csv and sweep.json in out_dir.
void write_sweep(const std::string& out_dir, const std::vector<SweepRow>& rows);

inline const char* kTableHeader =
    "kappa,beta,method,overlap,iters,coarse_dim,max_local_dofs,error_imp,wall_time";

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  int n_dofs = 0;
  double error = 0.0;
  double order = 0.0;  // log2 ratio to the previous row, 0 for the first
};

/// Relative imp-norm error of the direct solution against the edge
/// interpolant of the manufactured field on meshes n = n0 * 2^i.
std::vector<ConvergenceRow> convergence_study(double kappa, double epsilon, int n0,
                                              int refinements, bool zero_source = false);

/// Relative imp-norm error |E_h - r_h E|_S / |r_h E|_S.
double relative_imp_error(const RealSparseMatrix& S, const CVector& Eh, const CVector& ref);

/// C0 such that the theory rule at cfg.kappa keeps the given fraction of all
/// pencil eigenvalues.
double calibrate_C0(const ExperimentConfig& cfg, double target_fraction);

struct KnownRun {
  std::string group;
  std::string description;
  double kappa;
  double beta;
  std::string method;
  std::string overlap;
  int iterations;
  long coarse_dim;  // -1 when not reported
};

/// Iteration counts of large runs (up to ~1.5e7 unknowns), kept as
/// regression metadata; they are not reproducible at desk scale.
const std::vector<KnownRun>& known_large_runs();

}  // namespace maxdd
