#include "htlr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>

#include "htlr/error.hpp"
#include "htlr/htlr.hpp"
#include "htlr/oracles.hpp"
#include "htlr/quasi.hpp"
#include "json.hpp"

namespace htlr {

namespace {

using Clock = std::chrono::steady_clock;

// Best wall time of `repeats` runs of f; f's last result is kept in `out`.
template <class F, class R>
double best_of(int repeats, bool timing, F&& f, std::optional<R>& out) {
  if (!timing) {
    out.emplace(f());
    return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, repeats); ++r) {
    out.reset();
    const auto t0 = Clock::now();
    out.emplace(f());
    best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

AdmissibilityRule rule_from(const std::string& adm, std::optional<double> eta, int d) {
  if (adm == "weak") return AdmissibilityRule::weak();
  if (adm == "strong") return AdmissibilityRule::strong(eta.value_or(std::sqrt(static_cast<double>(d))));
  throw ConfigError("admissibility must be 'weak' or 'strong', got '" + adm + "'");
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> u(n);
  for (double& x : u) x = dist(rng);
  return u;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.17g", v); }

template <class Op>
void fill_storage(BenchRecord& r, const Op& op) {
  const StorageReport s = storage_report(op);
  r.dense_scalars = s.dense_scalars;
  r.factor_scalars = s.factor_scalars;
  r.core_scalars = s.core_scalars;
  r.total_scalars = s.total_scalars;
  r.bound = s.theoretical_bound;
}

}  // namespace

std::vector<BenchRecord> bench_uniform(const UniformBenchOptions& opt) {
  const KernelSpec kernel = kernel_from_name(opt.kernel, opt.d);
  const UniformGrid grid = make_grid(opt.d, opt.n);
  check_refinement(opt.n, opt.leaf);
  BuildConfig cfg;
  cfg.p = opt.p;
  cfg.leaf = opt.leaf;
  cfg.rule = rule_from(opt.adm, opt.eta, opt.d);
  cfg.kernel = kernel;
  cfg.threads = opt.threads;

  const NystromEntries exact(kernel, cfg.coeff, grid, cfg.quadrature);
  const std::vector<double> u = random_vector(grid.num_points(), opt.seed);
  const std::string id = "uniform-d" + std::to_string(opt.d) + "-" + opt.kernel + "-n" +
                         std::to_string(opt.n) + "-p" + std::to_string(opt.p) + "-leaf" +
                         std::to_string(opt.leaf) + "-" + opt.adm;

  BenchRecord base;
  base.id = id;
  base.d = opt.d;
  base.n = opt.n;
  base.kernel = opt.kernel;
  base.adm = opt.adm;
  base.p = opt.p;
  base.leaf = opt.leaf;
  base.seed = opt.seed;

  std::vector<BenchRecord> rows;
  {
    BenchRecord r = base;
    r.variant = "htlr";
    std::optional<HTLRMatrix> a;
    r.t_construct = best_of(opt.repeats, opt.timing, [&] { return construct(cfg, grid); }, a);
    std::optional<std::vector<double>> f;
    r.t_apply = best_of(opt.repeats, opt.timing, [&] { return matvec(*a, u, opt.threads); }, f);
    fill_storage(r, *a);
    r.e_apply_rand = estimate_rel_error_random(
        *f, [&](std::size_t i) { return exact.row_dot(i, u); }, opt.samples, opt.seed);
    rows.push_back(r);
  }
  if (opt.baseline) {
    BenchRecord r = base;
    r.variant = "hmatrix";
    std::optional<HMatrix> a;
    r.t_construct = best_of(opt.repeats, opt.timing, [&] { return construct_hmatrix(cfg, grid); }, a);
    std::optional<std::vector<double>> f;
    r.t_apply = best_of(opt.repeats, opt.timing, [&] { return hmatrix_matvec(*a, u, opt.threads); }, f);
    fill_storage(r, *a);
    r.e_apply_rand = estimate_rel_error_random(
        *f, [&](std::size_t i) { return exact.row_dot(i, u); }, opt.samples, opt.seed);
    rows.push_back(r);
  }
  return rows;
}

std::vector<RankRecord> rank_explore(const RankExploreOptions& opt) {
  const int d = opt.d;
  const KernelSpec kernel = kernel_from_name(opt.kernel, d);
  const std::size_t pts = opt.points ? opt.points : (d == 2 ? 32 : 16);
  std::vector<std::size_t> ps = opt.ps;
  if (ps.empty())
    for (std::size_t p = 1; p <= (d == 2 ? 16u : 8u); ++p) ps.push_back(p);
  for (std::size_t p : ps)
    if (p == 0 || p > pts) throw ConfigError("rank sweep needs 1 <= p <= points per direction");

  // Boxes of side 1/4 on a grid with `pts` points per box side.
  const UniformGrid grid = make_grid(d, 4 * pts);
  IndexBox tau;
  tau.d = d;
  for (int k = 0; k < d; ++k) tau.r[k] = {0, pts};

  std::vector<RankRecord> rows;
  for (const std::string& config : opt.configs) {
    IndexBox sigma = tau;
    if (config == "neighbor")
      sigma.r[0] = {pts, 2 * pts};
    else if (config == "separated")
      sigma.r[0] = {2 * pts, 3 * pts};
    else
      throw ConfigError("domain configuration must be 'neighbor' or 'separated', got '" + config + "'");

    const auto ti = box_indices(grid, tau), si = box_indices(grid, sigma);
    DenseMatrix exact(ti.size(), si.size());
    const double w = std::pow(grid.h(), d);
    for (std::size_t j = 0; j < si.size(); ++j)
      for (std::size_t i = 0; i < ti.size(); ++i)
        exact(i, j) = w * kernel.eval(grid.point(ti[i]), grid.point(si[j]), d);

    std::vector<double> spectrum;
    if (opt.with_svd) spectrum = singular_values(exact);
    Shape tshape(2 * d, pts);
    const DenseTensor exact_t(tshape, std::vector<double>(exact.data().begin(), exact.data().end()));

    auto push = [&](const std::string& method, std::size_t p, double e) {
      rows.push_back({d, opt.kernel, config, method, p, e});
    };
    for (std::size_t p : ps) {
      const TuckerBlock b = build_tlr(kernel, grid, tau, sigma, p);
      push("interp", p, rel_fro_error(materialize(b).data(), exact.data()));
      if (opt.with_svd) {
        std::size_t r = 1;
        for (int k = 0; k < d; ++k) r *= p;
        push("svd", p, tail_rel_error(spectrum, r));
      }
      if (opt.with_sthosvd) {
        const std::vector<std::size_t> ranks(2 * d, p);
        const TuckerDecomposition td = sthosvd(exact_t, ranks);
        push("sthosvd", p, rel_fro_error(tucker_reconstruct(td).data(), exact_t.data()));
      }
    }
  }
  return rows;
}

std::vector<QuasiRecord> bench_quasi(const QuasiBenchOptions& opt) {
  const KernelSpec kernel = kernel_from_name(opt.kernel, 2);
  const TriMesh mesh = opt.mesh_path.empty() ? structured_trimesh(opt.cells) : load_mesh(opt.mesh_path);
  const std::size_t N = mesh.size();
  std::vector<double> u(N, 1.0);
  if (!opt.constant_input)
    for (std::size_t i = 0; i < N; ++i) u[i] = smooth_test_function(mesh.centers[i]);

  const QuasiDirect exact(mesh, kernel, CoefficientFn::constant(0.0));
  const auto rows_sampled = sample_rows(N, std::min(opt.samples, N), opt.seed);
  std::vector<double> f_exact(N, 0.0);
  for (std::size_t i : rows_sampled) f_exact[i] = exact.row_dot(i, u);

  std::vector<QuasiRecord> out;
  for (double rho : opt.rhos) {
    QuasiConfig qc;
    qc.rho = rho;
    qc.p = opt.p;
    qc.kernel = kernel;
    qc.rule = rule_from(opt.adm, opt.eta, 2);
    qc.threads = opt.threads;
    QuasiRecord r;
    r.N = N;
    r.rho_requested = rho;
    r.kernel = opt.kernel;
    r.adm = opt.adm;
    r.p = opt.p;
    r.seed = opt.seed;
    std::optional<QuasiPipeline> pipe;
    r.t_construct = best_of(opt.repeats, opt.timing, [&] { return build_pipeline(mesh, qc); }, pipe);
    std::optional<std::vector<double>> f;
    r.t_apply = best_of(opt.repeats, opt.timing, [&] { return apply_pipeline(*pipe, u); }, f);
    r.rho = pipe->rho;
    r.m = pipe->m_side;
    r.leaf = pipe->op.config.leaf;
    r.total_scalars = storage_report(pipe->op).total_scalars;
    r.e_apply_rand = sampled_rel_error(*f, [&](std::size_t i) { return f_exact[i]; }, rows_sampled);
    r.id = "quasi-N" + std::to_string(N) + "-" + opt.kernel + "-rho" + fmt("%g", rho);
    out.push_back(r);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
  out << "id,variant,d,n,kernel,adm,p,leaf,t_construct,t_apply,dense_scalars,factor_scalars,"
         "core_scalars,total_scalars,bound,e_apply_rand,seed\n";
  for (const auto& r : rows)
    out << r.id << ',' << r.variant << ',' << r.d << ',' << r.n << ',' << r.kernel << ',' << r.adm
        << ',' << r.p << ',' << r.leaf << ',' << fmt("%.6e", r.t_construct) << ','
        << fmt("%.6e", r.t_apply) << ',' << r.dense_scalars << ',' << r.factor_scalars << ','
        << r.core_scalars << ',' << r.total_scalars << ',' << num(r.bound) << ','
        << num(r.e_apply_rand) << ',' << r.seed << '\n';
}

void write_csv(std::ostream& out, const std::vector<RankRecord>& rows) {
  out << "d,kernel,config,method,p,rel_fro_error\n";
  for (const auto& r : rows)
    out << r.d << ',' << r.kernel << ',' << r.config << ',' << r.method << ',' << r.p << ','
        << num(r.rel_fro_error) << '\n';
}

void write_csv(std::ostream& out, const std::vector<QuasiRecord>& rows) {
  out << "id,N,rho_requested,rho,m,kernel,adm,p,leaf,t_construct,t_apply,total_scalars,"
         "e_apply_rand,seed\n";
  for (const auto& r : rows)
    out << r.id << ',' << r.N << ',' << num(r.rho_requested) << ',' << num(r.rho) << ',' << r.m
        << ',' << r.kernel << ',' << r.adm << ',' << r.p << ',' << r.leaf << ','
        << fmt("%.6e", r.t_construct) << ',' << fmt("%.6e", r.t_apply) << ',' << r.total_scalars
        << ',' << num(r.e_apply_rand) << ',' << r.seed << '\n';
}

namespace {

nlohmann::json real(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

void write_json(std::ostream& out, const std::vector<BenchRecord>& rows) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : rows)
    a.push_back({{"id", r.id}, {"variant", r.variant}, {"d", r.d}, {"n", r.n},
                 {"kernel", r.kernel}, {"adm", r.adm}, {"p", r.p}, {"leaf", r.leaf},
                 {"t_construct", r.t_construct}, {"t_apply", r.t_apply},
                 {"dense_scalars", r.dense_scalars}, {"factor_scalars", r.factor_scalars},
                 {"core_scalars", r.core_scalars}, {"total_scalars", r.total_scalars},
                 {"bound", real(r.bound)}, {"e_apply_rand", real(r.e_apply_rand)}, {"seed", r.seed}});
  out << a.dump(2) << '\n';
}

void write_json(std::ostream& out, const std::vector<RankRecord>& rows) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : rows)
    a.push_back({{"d", r.d}, {"kernel", r.kernel}, {"config", r.config}, {"method", r.method},
                 {"p", r.p}, {"rel_fro_error", real(r.rel_fro_error)}});
  out << a.dump(2) << '\n';
}

void write_json(std::ostream& out, const std::vector<QuasiRecord>& rows) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : rows)
    a.push_back({{"id", r.id}, {"N", r.N}, {"rho_requested", r.rho_requested}, {"rho", r.rho},
                 {"m", r.m}, {"kernel", r.kernel}, {"adm", r.adm}, {"p", r.p}, {"leaf", r.leaf},
                 {"t_construct", r.t_construct}, {"t_apply", r.t_apply},
                 {"total_scalars", r.total_scalars}, {"e_apply_rand", real(r.e_apply_rand)},
                 {"seed", r.seed}});
  out << a.dump(2) << '\n';
}

}  // namespace htlr
