#pragma once

// Experiment drivers behind the htlr_bench command line tool. Each driver
// returns plain records; formatting lives in write_csv / write_json.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace htlr {

struct UniformBenchOptions {
  int d = 2;
  std::string kernel = "gaussian";
  std::size_t n = 64;
  std::size_t p = 8;
  std::size_t leaf = 16;
  std::string adm = "weak";
  std::optional<double> eta;  // default sqrt(d)
  bool baseline = false;
  std::uint64_t seed = 0;
  int threads = 1;
  int repeats = 3;       // best-of for timings
  bool timing = true;    // false writes 0 for every time column
  std::size_t samples = 1000;
};

struct BenchRecord {
  std::string id;
  std::string variant;  // "htlr" or "hmatrix"
  int d = 2;
  std::size_t n = 0;
  std::string kernel;
  std::string adm;
  std::size_t p = 0;
  std::size_t leaf = 0;
  double t_construct = 0.0;
  double t_apply = 0.0;
  std::size_t dense_scalars = 0;
  std::size_t factor_scalars = 0;
  std::size_t core_scalars = 0;
  std::size_t total_scalars = 0;
  double bound = 0.0;
  double e_apply_rand = 0.0;
  std::uint64_t seed = 0;
};

std::vector<BenchRecord> bench_uniform(const UniformBenchOptions& opt);

struct RankExploreOptions {
  int d = 2;
  std::string kernel = "slp2d";
  std::vector<std::string> configs = {"neighbor", "separated"};
  std::vector<std::size_t> ps;  // empty: 1..16 in 2D, 1..8 in 3D
  std::size_t points = 0;       // per direction; 0: 32 in 2D, 16 in 3D
  bool with_svd = true;
  bool with_sthosvd = true;
};

struct RankRecord {
  int d = 2;
  std::string kernel;
  std::string config;
  std::string method;  // "interp", "svd", "sthosvd"
  std::size_t p = 0;
  double rel_fro_error = 0.0;
};

std::vector<RankRecord> rank_explore(const RankExploreOptions& opt);

struct QuasiBenchOptions {
  std::size_t cells = 64;  // structured mesh cells per side: N = 2 cells^2
  std::string mesh_path;   // overrides `cells` when set
  std::vector<double> rhos = {1.5, 2.0, 3.0};
  std::string kernel = "gaussian";
  std::string adm = "weak";
  std::optional<double> eta;
  std::size_t p = 8;
  std::uint64_t seed = 0;
  int threads = 1;
  int repeats = 3;
  bool timing = true;
  std::size_t samples = 1000;
  bool constant_input = false;  // u = 1 instead of the smooth test function
};

struct QuasiRecord {
  std::string id;
  std::size_t N = 0;
  double rho_requested = 0.0;
  double rho = 0.0;
  std::size_t m = 0;
  std::string kernel;
  std::string adm;
  std::size_t p = 0;
  std::size_t leaf = 0;
  double t_construct = 0.0;
  double t_apply = 0.0;
  std::size_t total_scalars = 0;
  double e_apply_rand = 0.0;
  std::uint64_t seed = 0;
};

std::vector<QuasiRecord> bench_quasi(const QuasiBenchOptions& opt);

void write_csv(std::ostream& out, const std::vector<BenchRecord>& rows);
void write_csv(std::ostream& out, const std::vector<RankRecord>& rows);
void write_csv(std::ostream& out, const std::vector<QuasiRecord>& rows);
void write_json(std::ostream& out, const std::vector<BenchRecord>& rows);
void write_json(std::ostream& out, const std::vector<RankRecord>& rows);
void write_json(std::ostream& out, const std::vector<QuasiRecord>& rows);

}  // namespace htlr
