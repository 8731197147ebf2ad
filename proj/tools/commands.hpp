#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace seldet::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

struct AnalyzeOptions {
  std::filesystem::path matrix;
  std::string ordering = "amd";
  std::optional<std::filesystem::path> csv;
};

struct SelinvOptions {
  std::filesystem::path matrix;
  std::string ordering = "amd";
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> csv;
  bool verify = false;
};

struct RemlOptions {
  std::filesystem::path dataset;
  std::string ordering = "amd";
  std::optional<double> sigma2;
  std::vector<double> gamma;  // empty: all ones
  std::vector<double> phi;    // empty: all ones
  bool check_h_form = false;
  bool fd_check = false;
  std::optional<std::filesystem::path> csv;
};

struct GenOptions {
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> config;
  std::vector<std::pair<std::string, std::string>> settings;  // applied last
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> csv;
};

struct BenchOptions {
  std::vector<std::string> problems;  // prob1..prob10, .mtx or dataset files
  std::vector<std::string> orderings{"amd"};
  std::uint64_t seed = 1;
  int repeat = 1;
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> fig_out;
};

struct VerifyOptions {
  std::filesystem::path input;  // .mtx: matrix checks; otherwise a dataset
  std::string ordering = "amd";
};

// Each command writes its report to `out` and diagnostics to `err` and
// returns an exit code. Library errors propagate as seldet::Error.
int run_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err);
int run_selinv(const SelinvOptions& o, std::ostream& out, std::ostream& err);
int run_reml(const RemlOptions& o, std::ostream& out, std::ostream& err);
int run_gen(const GenOptions& o, std::ostream& out, std::ostream& err);
int run_bench(const BenchOptions& o, std::ostream& out, std::ostream& err);
int run_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err);

inline const char* const kAnalyzeCsvHeader =
    "matrix,ordering,n,nnz_C,n_z,density_permille,nnz_L,ldlt_flops,selinv_flops";
inline const char* const kBenchCsvHeader =
    "problem,ordering,n,nnz_C,nnz_L,ldlt_predicted,ldlt_measured,selinv_predicted,selinv_measured,"
    "t_order,t_symbolic,t_factor,t_selinv,t_total,status";
inline const char* const kFigCsvHeader = "problem,ordering,nnz_L,time";

}  // namespace seldet::cli
