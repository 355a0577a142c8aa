#include "maxdd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "maxdd/io.hpp"
#include "maxdd/linalg.hpp"

namespace maxdd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

// Numbers may be written with a trailing "pi", e.g. "2pi" or "1.5 pi".
double parse_number(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  double scale = 1.0;
  if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
    scale = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (s.empty()) return scale;
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v * scale;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': " + raw);
  }
}

int parse_int(const std::string& key, const std::string& raw) {
  const double v = parse_number(key, raw);
  if (v != std::floor(v)) throw ConfigError("expected an integer for '" + key + "': " + raw);
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("invalid boolean for '" + key + "': " + raw);
}

std::string overlap_label(const ExperimentConfig& cfg) { return cfg.overlap; }

nlohmann::json config_json(const ExperimentConfig& c, const ResolvedConfig& r) {
  nlohmann::json j;
  j["kappa"] = c.kappa;
  j["epsilon_rule"] = c.epsilon_rule;
  j["gamma"] = c.gamma;
  j["n_ppw"] = c.n_ppw;
  j["beta"] = c.beta;
  j["overlap"] = c.overlap;
  j["method"] = to_string(c.method);
  j["C0"] = c.C0;
  j["tol"] = c.tol;
  j["maxit"] = c.maxit;
  j["weighted"] = c.weighted;
  j["right_precond"] = c.right_precond;
  j["case"] = c.case_kind == CaseKind::Dipole ? "dipole" : "manufactured";
  j["seed"] = c.seed;
  j["fov_samples"] = c.fov_samples;
  j["resolved"] = {{"n", r.n},           {"h", r.spacing},
                   {"parts", r.parts},   {"subdomains", r.parts * r.parts * r.parts},
                   {"overlap_layers", r.overlap_layers},
                   {"epsilon", r.epsilon}, {"alpha", r.alpha},
                   {"sigma", r.sigma},   {"rho", r.rho},
                   {"mu", r.mu}};
  return j;
}

nlohmann::json report_json(const RunReport& rep) {
  nlohmann::json j;
  j["config"] = config_json(rep.config, rep.resolved);
  j["n_dofs"] = rep.n_dofs;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["coarse_dim"] = rep.coarse_dim;
  j["max_local_dofs"] = rep.max_local_dofs;
  j["residual_history"] = rep.history;
  j["error_imp"] = rep.error_imp ? nlohmann::json(*rep.error_imp) : nlohmann::json(nullptr);
  if (rep.fov)
    j["field_of_values"] = {{"max_ratio", rep.fov->max_ratio},
                            {"min_inner", rep.fov->min_inner},
                            {"tau", rep.fov->tau}};
  j["decomposition"] = {{"local_dofs", rep.local_dofs}, {"gamma_edges", rep.local_m}};
  j["timings"] = rep.timings;
  j["wall_time"] = rep.wall_time;
  j["notes"] = rep.notes;
  return j;
}

std::string csv_row(const ExperimentConfig& c, const RunReport* rep) {
  std::ostringstream os;
  os << std::setprecision(10) << c.kappa << ',' << c.beta << ',' << to_string(c.method) << ','
     << overlap_label(c) << ',';
  if (rep) {
    os << rep->iterations << ',' << rep->coarse_dim << ',' << rep->max_local_dofs << ',';
    if (rep->error_imp) os << *rep->error_imp;
    os << ',' << rep->wall_time;
  } else {
    os << "NA,NA,NA,,NA";
  }
  return os.str();
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::None: return "none";
    case Method::Wasi: return "wasi";
    case Method::Spectral: return "spectral";
    case Method::Economical: return "economical";
    case Method::Grid: return "grid";
  }
  return "unknown";
}

Method parse_method(const std::string& s) {
  const std::string t = trim(s);
  if (t == "none") return Method::None;
  if (t == "wasi" || t == "one-level") return Method::Wasi;
  if (t == "spectral") return Method::Spectral;
  if (t == "economical" || t == "ecs") return Method::Economical;
  if (t == "grid" || t == "gcs") return Method::Grid;
  throw ConfigError("unknown method '" + s + "'");
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    for (const auto& [k, v] : kv)
      if (k == key) throw ConfigError("duplicate key '" + key + "'");
    kv.emplace_back(key, value);
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  return parse_key_values(in);
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "kappa") c.kappa = parse_number(key, v);
  else if (key == "epsilon" || key == "epsilon_rule") c.epsilon_rule = trim(v);
  else if (key == "gamma") c.gamma = parse_number(key, v);
  else if (key == "n_ppw") c.n_ppw = parse_number(key, v);
  else if (key == "mesh_n" || key == "n") c.mesh_n = parse_int(key, v);
  else if (key == "parts" || key == "parts_per_dim") c.parts = trim(v) == "auto" ? 0 : parse_int(key, v);
  else if (key == "alpha") c.alpha = trim(v) == "auto" ? -1.0 : parse_number(key, v);
  else if (key == "beta") c.beta = parse_number(key, v);
  else if (key == "overlap") c.overlap = trim(v);
  else if (key == "method") c.method = parse_method(v);
  else if (key == "rho") c.rho = trim(v) == "auto" ? 0.0 : parse_number(key, v);
  else if (key == "C0") c.C0 = parse_number(key, v);
  else if (key == "mu") c.mu = trim(v) == "auto" ? 0 : parse_int(key, v);
  else if (key == "tol") c.tol = parse_number(key, v);
  else if (key == "maxit") c.maxit = parse_int(key, v);
  else if (key == "weighted") c.weighted = parse_bool(key, v);
  else if (key == "right_precond") c.right_precond = parse_bool(key, v);
  else if (key == "case") {
    const std::string t = trim(v);
    if (t == "manufactured") c.case_kind = CaseKind::Manufactured;
    else if (t == "dipole") c.case_kind = CaseKind::Dipole;
    else throw ConfigError("unknown case '" + v + "'");
  } else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "fov_samples") c.fov_samples = parse_int(key, v);
  else if (key == "write_vtk") c.write_vtk = parse_bool(key, v);
  else if (key == "write_matrices") c.write_matrices = parse_bool(key, v);
  else if (key == "dump_spectra") c.dump_spectra = parse_bool(key, v);
  else if (key == "out" || key == "out_dir") c.out_dir = trim(v);
  else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig config_from(const KeyValues& kv) {
  ExperimentConfig c;
  for (const auto& [k, v] : kv) {
    if (v.find(',') != std::string::npos)
      throw ConfigError("key '" + k + "' has a list value; use sweep");
    apply_key(c, k, v);
  }
  return c;
}

std::vector<ExperimentConfig> expand_sweep(const KeyValues& kv) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& [k, v] : kv) axes.emplace_back(k, split_list(v));
  std::vector<ExperimentConfig> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    ExperimentConfig c;
    for (std::size_t a = 0; a < axes.size(); ++a) apply_key(c, axes[a].first, axes[a].second[idx[a]]);
    out.push_back(c);
    // Last key varies fastest.
    int a = static_cast<int>(axes.size()) - 1;
    while (a >= 0 && ++idx[a] == axes[a].second.size()) idx[a--] = 0;
    if (a < 0) break;
  }
  return out;
}

double epsilon_from_rule(const std::string& rule, double kappa) {
  if (rule == "zero") return 0.0;
  if (rule == "kappa") return kappa;
  if (rule == "kappa2") return kappa * kappa;
  return parse_number("epsilon", rule);
}

ResolvedConfig resolve(const ExperimentConfig& c) {
  if (!(c.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(c.beta >= 0.0 && c.beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
  if (c.maxit < 1) throw ConfigError("maxit must be >= 1");
  ResolvedConfig r;
  r.parts = c.parts > 0 ? c.parts
                        : std::max(1, static_cast<int>(std::lround(std::pow(c.kappa, c.beta))));
  if (c.mesh_n > 0) {
    if (c.mesh_n % r.parts != 0)
      throw ConfigError("mesh_n must be a multiple of parts (" + std::to_string(r.parts) + ")");
    r.n = c.mesh_n;
  } else {
    const double h = c.n_ppw > 0.0 ? (2.0 * std::numbers::pi / c.kappa) / c.n_ppw
                                   : std::pow(c.kappa, -(1.0 + c.gamma));
    const int nmin = std::max(1, static_cast<int>(std::ceil(1.0 / h - 1e-9)));
    r.n = ((nmin + r.parts - 1) / r.parts) * r.parts;
  }
  r.spacing = 1.0 / r.n;
  if (c.overlap == "minimal") r.overlap_layers = 1;
  else if (c.overlap == "generous") r.overlap_layers = generous_overlap_layers(r.n, r.parts);
  else r.overlap_layers = parse_int("overlap", c.overlap);
  if (r.overlap_layers < 1) throw ConfigError("overlap must be >= 1 layer");

  r.epsilon = c.case_kind == CaseKind::Dipole ? 0.0 : epsilon_from_rule(c.epsilon_rule, c.kappa);
  if (r.epsilon < 0.0 || r.epsilon > c.kappa * c.kappa)
    throw ConfigError("epsilon must satisfy 0 <= epsilon <= kappa^2");
  if (c.alpha >= 0.0) {
    r.alpha = c.alpha;
  } else if (r.epsilon > 0.0 && c.kappa != 1.0) {
    r.alpha = std::log(r.epsilon) / std::log(c.kappa) - 1.0;
  }
  r.alpha = std::clamp(r.alpha, 0.0, c.beta);
  r.sigma = 2.0 - (r.alpha + c.beta) + 0.5 * c.gamma;
  r.rho = c.rho > 0.0 ? c.rho : choose_rho(c.kappa, r.alpha, c.beta, c.gamma, c.C0);
  if (!(r.rho > 0.0 && r.rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
  r.mu = c.mu > 0 ? c.mu : mu_rule(c.kappa, c.beta);
  return r;
}

CVec3 ManufacturedCase::E(const Vec3& p) const {
  const double x = p[0], y = p[1], z = p[2], k = kappa;
  return CVec3(cplx(x * z * std::sin(k * y), y * z * std::cos(k * x)),
               cplx(-z * std::sin(k * y), -z * std::sin(k * x)), cplx(x * y, x * y));
}

CVec3 ManufacturedCase::curl_E(const Vec3& p) const {
  const double x = p[0], y = p[1], z = p[2], k = kappa;
  return CVec3(cplx(x + std::sin(k * y), x + std::sin(k * x)),
               cplx(x * std::sin(k * y) - y, y * std::cos(k * x) - y),
               cplx(-k * x * z * std::cos(k * y), -(k + 1.0) * z * std::cos(k * x)));
}

CVec3 ManufacturedCase::curl_curl_E(const Vec3& p) const {
  const double x = p[0], y = p[1], z = p[2], k = kappa;
  return CVec3(cplx(k * k * x * z * std::sin(k * y), 0.0),
               cplx(k * z * std::cos(k * y), -(k * k + k) * z * std::sin(k * x)),
               cplx(std::sin(k * y) - k * std::cos(k * y), -k * y * std::sin(k * x)));
}

CVec3 ManufacturedCase::J(const Vec3& x) const {
  return curl_curl_E(x) - cplx(kappa * kappa, epsilon) * E(x);
}

CVec3 ManufacturedCase::g(const Vec3& x, const Vec3& n) const {
  const CVec3 e = E(x);
  const CVec3 nc = n.cast<cplx>();
  const CVec3 et = e - (nc.transpose() * e)(0) * nc;
  return cross(curl_E(x), nc) - kI * kappa * et;
}

FieldSource ManufacturedCase::source() const {
  FieldSource s;
  const ManufacturedCase mc = *this;
  s.J = [mc](const Vec3& x) { return mc.J(x); };
  s.g = [mc](const Vec3& x, const Vec3& n) { return mc.g(x, n); };
  return s;
}

ManufacturedCase manufactured_case(double kappa, double epsilon) {
  ManufacturedCase mc;
  mc.kappa = kappa;
  mc.epsilon = epsilon;
  return mc;
}

cplx layered_permittivity(double z, const std::array<double, 3>& iz) {
  if (z >= iz[0]) return {1.0, 0.0};
  if (z >= iz[1]) return {11.5, 1e-4};
  if (z >= iz[2]) return {2.1, 1e-5};
  return {1.0, 1e7};
}

DipoleCase dipole_case(const BoxMesh& mesh) {
  DipoleCase dc;
  const int n = mesh.n();
  const double hz = mesh.box().extent()[2] / n;
  const double z0 = mesh.box().lo[2];
  const std::array<double, 3> nominal{0.5, 0.2, 0.025};
  for (int i = 0; i < 3; ++i) {
    int plane = static_cast<int>(std::lround((nominal[i] - z0) / hz));
    plane = std::clamp(plane, 1, n - 1);
    dc.interfaces[i] = z0 + plane * hz;
    if (std::abs(dc.interfaces[i] - nominal[i]) > 1e-12) {
      std::ostringstream os;
      os << "layer interface z=" << nominal[i] << " snapped to mesh plane z=" << dc.interfaces[i];
      dc.notes.push_back(os.str());
    }
  }
  if (!(dc.interfaces[0] > dc.interfaces[1] && dc.interfaces[1] > dc.interfaces[2]))
    dc.notes.push_back("mesh too coarse to separate all layers");
  dc.rel_permittivity.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c)
    dc.rel_permittivity[c] = layered_permittivity(mesh.cell_centroid(c)[2], dc.interfaces);

  Vec3 x0(0.5, 0.5, 0.8);
  const Vec3 spacing = mesh.box().extent() / n;
  for (int d = 0; d < 3; ++d) {
    const double t = (x0[d] - mesh.box().lo[d]) / spacing[d];
    if (std::abs(t - std::round(t)) < 1e-9) {
      x0[d] += spacing[d] / 100.0;
      std::ostringstream os;
      os << "dipole coordinate " << d << " lies on a mesh plane; shifted by h/100 to " << x0[d];
      dc.notes.push_back(os.str());
    }
  }
  dc.source.position = x0;
  dc.source.moment = CVec3(1.0, 0.0, 0.0);
  return dc;
}

PreconditionerBuild build_preconditioner(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                                         const Decomposition& dec, const ProblemParams& params,
                                         const ComplexSparseMatrix& A, const CoarseOptions& opts) {
  PreconditionerBuild out;
  PartitionOfUnity pou = build_pou(dec, dofmap);
  std::vector<LocalSystem> locals;
  locals.reserve(dec.size());
  for (int l = 0; l < dec.size(); ++l) {
    locals.push_back(assemble_local(dofmap, tags, dec, l, params));
    out.m_l.push_back(locals.back().m());
  }
  CoarseSpace coarse;
  if (opts.method == Method::Spectral || opts.method == Method::Economical) {
    CoarseBuilder builder(dofmap.n_dofs());
    for (int l = 0; l < dec.size(); ++l) {
      const LocalSystem& local = locals[l];
      if (local.m() == 0) continue;
      if (opts.method == Method::Spectral) {
        const CMatrix V = build_harmonic_basis(local);
        SpectralSelection sel = select_modes(build_geneo_pencil(local, V, pou.chi[l]), opts.rho);
        add_spectral_columns(builder, local, V, pou.chi[l], sel);
        out.candidates += local.m();
        if (opts.keep_spectra) {
          sel.eigenvectors.resize(0, 0);
          out.spectra.push_back(std::move(sel));
        }
      } else {
        const auto cols = build_economical_basis(dofmap, local, star_map(dofmap.mesh(), dec.boxes[l]),
                                                 opts.mu, pou.chi[l]);
        out.candidates += cols.candidates;
        for (Eigen::Index j = 0; j < cols.columns.cols(); ++j)
          builder.add_column(l, local.dofs, cols.columns.col(j));
      }
    }
    coarse = builder.finish(A);
  } else if (opts.method == Method::Grid) {
    coarse = build_grid_coarse(dofmap, dec, A);
  }
  const SchwarzMode mode = opts.method == Method::Wasi ? SchwarzMode::OneLevel : SchwarzMode::Hybrid;
  out.precond = std::make_unique<SchwarzPreconditioner>(A, std::move(locals), std::move(pou),
                                                        std::move(coarse), mode);
  return out;
}

double relative_imp_error(const RealSparseMatrix& S, const CVector& Eh, const CVector& ref) {
  const CVector d = Eh - ref;
  const double num = std::sqrt(std::max(0.0, d.dot(S * d).real()));
  const double den = std::sqrt(std::max(0.0, ref.dot(S * ref).real()));
  return den > 0.0 ? num / den : num;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  const auto t_start = Clock::now();
  RunReport rep;
  rep.config = cfg;
  rep.resolved = resolve(cfg);
  const ResolvedConfig& r = rep.resolved;

  auto t0 = Clock::now();
  const BoxMesh mesh = BoxMesh::build(Box::unit(), r.n);
  const BoundaryTags tags = classify_boundary(mesh);
  const EdgeDofMap dofmap(mesh);
  ProblemParams params;
  params.kappa = cfg.kappa;
  params.epsilon = r.epsilon;
  std::optional<ManufacturedCase> mc;
  SourceCase source;
  if (cfg.case_kind == CaseKind::Dipole) {
    DipoleCase dc = dipole_case(mesh);
    params.rel_permittivity = std::move(dc.rel_permittivity);
    source = dc.source;
    for (auto& note : dc.notes) rep.notes.push_back(std::move(note));
  } else {
    mc = manufactured_case(cfg.kappa, r.epsilon);
    source = mc->source();
  }
  const AssembledSystem sys = assemble_system(dofmap, tags, params, source);
  rep.n_dofs = dofmap.n_dofs();
  rep.timings["assembly"] = seconds_since(t0);

  t0 = Clock::now();
  const Decomposition dec = build_decomposition(mesh, r.parts, r.overlap_layers);
  PreconditionerBuild pb;
  if (cfg.method != Method::None) {
    CoarseOptions co;
    co.method = cfg.method;
    co.rho = r.rho;
    co.mu = r.mu;
    co.keep_spectra = cfg.dump_spectra;
    pb = build_preconditioner(dofmap, tags, dec, params, sys.A, co);
    rep.coarse_dim = pb.precond->coarse().dim();
    rep.max_local_dofs = pb.precond->max_local_dofs();
    for (const auto& l : pb.precond->locals()) rep.local_dofs.push_back(l.size());
    rep.local_m = pb.m_l;
    if (pb.precond->coarse().rejected > 0)
      rep.notes.push_back(std::to_string(pb.precond->coarse().rejected) +
                          " coarse columns rejected for small norm");
    if (cfg.method != Method::Wasi && rep.coarse_dim == 0)
      rep.notes.push_back("empty coarse space: two-level reduces to one-level");
  }
  rep.timings["preconditioner"] = seconds_since(t0);

  t0 = Clock::now();
  const ComplexSparseMatrix& A = sys.A;
  LinearOperator opA = [&A](const CVector& v) { return CVector(A * v); };
  LinearOperator opB;
  if (pb.precond) {
    const SchwarzPreconditioner* P = pb.precond.get();
    opB = [P](const CVector& v) { return P->apply(v); };
  }
  GmresOptions go;
  go.tol = cfg.tol;
  go.maxit = cfg.maxit;
  go.side = cfg.right_precond ? PrecondSide::Right : PrecondSide::Left;
  ComplexSparseMatrix Sc;
  if (cfg.weighted) {
    Sc = sys.S_imp.cast<cplx>();
    go.weight = &Sc;
  }
  const GmresResult gr = gmres(opA, opB, sys.rhs, go);
  rep.iterations = gr.iterations;
  rep.converged = gr.converged;
  rep.history = gr.history;
  rep.solution = gr.x;
  rep.timings["solve"] = seconds_since(t0);

  if (mc) rep.error_imp = relative_imp_error(sys.S_imp, gr.x,
                                             interpolate_field(dofmap, [&](const Vec3& x) { return mc->E(x); }));
  if (cfg.fov_samples > 0 && opB) {
    t0 = Clock::now();
    rep.fov = field_of_values_diagnostics(opB, A, sys.S_imp, cfg.fov_samples, cfg.seed);
    rep.timings["diagnostics"] = seconds_since(t0);
  }

  if (!cfg.out_dir.empty() && (cfg.write_vtk || cfg.write_matrices || cfg.dump_spectra)) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);
    if (cfg.write_vtk)
      write_vtk((dir / "solution.vtk").string(), dofmap, gr.x, params.rel_permittivity);
    if (cfg.write_matrices) {
      write_matrix_market((dir / "A.mtx").string(), sys.A);
      write_matrix_market((dir / "S_imp.mtx").string(), sys.S_imp);
      write_matrix_market((dir / "rhs.mtx").string(), sys.rhs);
    }
    if (cfg.dump_spectra && !pb.spectra.empty())
      write_spectra_csv((dir / "spectra.csv").string(), pb.spectra);
  }
  rep.wall_time = seconds_since(t_start);
  return rep;
}

void write_run_outputs(const RunReport& rep) {
  if (rep.config.out_dir.empty()) return;
  std::filesystem::create_directories(rep.config.out_dir);
  const std::filesystem::path dir(rep.config.out_dir);
  write_json((dir / "report.json").string(), report_json(rep));
  std::ofstream csv(dir / "table.csv");
  if (!csv) throw ConfigError("cannot write table.csv");
  csv << kTableHeader << '\n' << csv_row(rep.config, &rep) << '\n';
}

std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs) {
  if (configs.empty()) throw ConfigError("sweep: empty configuration list");
  std::vector<SweepRow> rows;
  for (const auto& c : configs) {
    SweepRow row;
    row.config = c;
    try {
      row.report = run_experiment(c);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep(const std::string& out_dir, const std::vector<SweepRow>& rows) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::ofstream csv(dir / "table.csv");
  if (!csv) throw ConfigError("cannot write table.csv");
  csv << kTableHeader << '\n';
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    csv << csv_row(row.config, row.report ? &*row.report : nullptr) << '\n';
    if (row.report) {
      arr.push_back(report_json(*row.report));
    } else {
      nlohmann::json j;
      j["config"] = {{"kappa", row.config.kappa}, {"beta", row.config.beta},
                     {"method", to_string(row.config.method)}, {"overlap", row.config.overlap}};
      j["error"] = row.error;
      arr.push_back(j);
    }
  }
  write_json((dir / "sweep.json").string(), arr);
}

std::vector<ConvergenceRow> convergence_study(double kappa, double epsilon, int n0,
                                              int refinements, bool zero_source) {
  if (refinements < 2) throw ConfigError("convergence_study: need at least 2 refinements");
  if (n0 < 1) throw ConfigError("convergence_study: n0 must be >= 1");
  const ManufacturedCase mc = manufactured_case(kappa, epsilon);
  std::vector<ConvergenceRow> rows;
  for (int i = 0; i <= refinements; ++i) {
    const int n = n0 << i;
    const BoxMesh mesh = BoxMesh::build(Box::unit(), n);
    const BoundaryTags tags = classify_boundary(mesh);
    const EdgeDofMap dofmap(mesh);
    ProblemParams params;
    params.kappa = kappa;
    params.epsilon = epsilon;
    const SourceCase src = zero_source ? SourceCase(FieldSource{}) : SourceCase(mc.source());
    const AssembledSystem sys = assemble_system(dofmap, tags, params, src);
    const SparseLU lu(sys.A);
    const CVector Eh = lu.solve(sys.rhs);
    const CVector ref = zero_source ? CVector(CVector::Zero(dofmap.n_dofs()))
                                    : interpolate_field(dofmap, [&](const Vec3& x) { return mc.E(x); });
    ConvergenceRow row;
    row.n = n;
    row.h = 1.0 / n;
    row.n_dofs = dofmap.n_dofs();
    row.error = relative_imp_error(sys.S_imp, Eh, ref);
    if (!rows.empty() && row.error > 0.0 && rows.back().error > 0.0)
      row.order = std::log2(rows.back().error / row.error);
    rows.push_back(row);
  }
  return rows;
}

double calibrate_C0(const ExperimentConfig& cfg, double target_fraction) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0))
    throw ConfigError("calibrate_C0: target fraction must lie in (0, 1]");
  const ResolvedConfig r = resolve(cfg);
  const BoxMesh mesh = BoxMesh::build(Box::unit(), r.n);
  const BoundaryTags tags = classify_boundary(mesh);
  const EdgeDofMap dofmap(mesh);
  ProblemParams params;
  params.kappa = cfg.kappa;
  params.epsilon = r.epsilon;
  const Decomposition dec = build_decomposition(mesh, r.parts, r.overlap_layers);
  const PartitionOfUnity pou = build_pou(dec, dofmap);
  std::vector<double> all;
  for (int l = 0; l < dec.size(); ++l) {
    const LocalSystem local = assemble_local(dofmap, tags, dec, l, params);
    if (local.m() == 0) continue;
    const CMatrix V = build_harmonic_basis(local);
    const GeneoPencil p = build_geneo_pencil(local, V, pou.chi[l]);
    const GenEigResult eig = hermitian_gen_eig(p.L, p.R);
    all.insert(all.end(), eig.values.data(), eig.values.data() + eig.values.size());
  }
  if (all.empty()) throw ConfigError("calibrate_C0: no interface modes (single subdomain?)");
  std::sort(all.begin(), all.end(), std::greater<>());
  const std::size_t k = std::min(
      all.size() - 1,
      static_cast<std::size_t>(std::max(0.0, std::ceil(target_fraction * all.size()) - 1.0)));
  const double rho = std::clamp(std::sqrt(std::max(all[k], 0.0)), 1e-8, 0.999);
  return rho * std::pow(cfg.kappa, r.sigma);
}

const std::vector<KnownRun>& known_large_runs() {
  static const std::vector<KnownRun> runs{
      {"spectral-robustness", "linear elements, eps = kappa, generous overlap", 4 * std::numbers::pi,
       0.8, "spectral", "generous", 32, 126944},
      {"economical", "eps = kappa, mu = kappa^(1-beta/2), generous overlap", 6 * std::numbers::pi,
       0.6, "economical", "generous", 11, 34560},
      {"method-comparison", "generous overlap", 6 * std::numbers::pi, 0.6, "economical",
       "generous", 11, -1},
      {"method-comparison", "generous overlap", 6 * std::numbers::pi, 0.6, "wasi", "generous", 40,
       -1},
      {"method-comparison", "generous overlap", 6 * std::numbers::pi, 0.6, "grid", "generous", 36,
       -1},
      {"layered-dipole", "8 points per wavelength, N = 216, mu = 12, minimal overlap",
       10 * std::numbers::pi, -1.0, "economical", "minimal", 26, 72576},
  };
  return runs;
}

}  // namespace maxdd
