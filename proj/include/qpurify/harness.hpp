#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qpurify/asymptotics.hpp"
#include "qpurify/dephasing.hpp"

// CLI front end: flat key=value configuration, experiment commands, and
// deterministic CSV emission. The only module with I/O.

namespace qpurify::harness {

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key=value store; later assignments win, flags override file entries.
class Config {
  public:
    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_real(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    // Complex values are written "re,im"; a bare real is accepted.
    cplx get_complex(const std::string& key, cplx fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

enum class Model { dephasing, dissipative };

struct RunConfig {
    Model model = Model::dissipative;
    DephasingParams dephasing;
    DissipativeParams dissipative;
    CMat2 initial_state = CMat2{{cplx(0.5), 0, 0, cplx(0.5)}};
    int n_steps = 50;
    std::vector<std::string> columns;  // subset of the run schema; empty = all
    long seed = 1;
    std::optional<double> tol_override;
};

RunConfig parse_run_config(const Config& cfg);

// One row per step: n, trace, purity, fid_target, rho_uu_re, rho_ud_re,
// rho_ud_im, rho_dd_re. Deterministic for a fixed config. Returns exit code.
int run_command(const Config& cfg, std::ostream& out, std::ostream& err);

// Oracle-equivalence suites at the configured parameter point; one line per
// check with the max deviation and PASS/FAIL. Exit 0 iff all pass.
int check_command(const Config& cfg, std::ostream& out, std::ostream& err);

// Grid sweep over up to 3 axes of {gamma_tau, alpha_re, alpha_im, tau, n};
// rows in lexicographic axis order.
int sweep_command(const Config& cfg, std::ostream& out, std::ostream& err);

// Seeded random verification of the nested-sum identity (closed vs brute).
int identity_test_command(int l_max, int k_max, int trials, long seed, double tol,
                          std::ostream& out, std::ostream& err);

// 17 significant digits, '.' decimal point; round-trip safe.
std::string fmt_real(double v);

}  // namespace qpurify::harness
