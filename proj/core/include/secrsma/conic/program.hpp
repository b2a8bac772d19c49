#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "secrsma/conic/expr.hpp"
#include "secrsma/conic/solver.hpp"

namespace secrsma::conic {

enum class Sense { le, ge, eq };

struct SolveOptions {
  double tol = 1e-8;
  int max_iters = 400;
  int verbosity = 0;
};

struct SolveResult {
  Status status = Status::numerical_limit;
  double objective = 0.0;
  std::map<std::string, double> scalars;
  std::map<std::string, CMat> matrices;
  double primal_res = 0.0, dual_res = 0.0, gap = 0.0;
  int iterations = 0;
};

struct Violation {
  std::string what;
  double amount;  // positive means violated
};

/// Conic model container: named scalar and Hermitian matrix variables,
/// affine constraints, PSD constraints, exponential cones, and a linear
/// objective. Lowered to StandardForm at solve time.
class Program {
 public:
  int add_scalar(const std::string& name, bool nonneg = false);
  int add_hermitian(const std::string& name, int dim, bool psd = true);

  int scalar_id(const std::string& name) const;
  int hermitian_id(const std::string& name) const;

  /// expr (<=, >=, ==) 0.
  void add_constraint(RealExpr e, Sense sense);
  /// expr is positive semidefinite.
  void add_psd(HermExpr e);
  /// y exp(x / y) <= z.
  void add_exp_cone(RealExpr x, RealExpr y, RealExpr z);
  /// t <= log2(a), encoded as the exponential cone (t ln2, 1, a).
  void add_log2_lower_bound(const RealExpr& a, const RealExpr& t);
  void set_objective(RealExpr e, bool maximize);

  SolveResult solve(const SolveOptions& opt = {}) const;

  /// Constraint-by-constraint violation recheck from the returned values,
  /// independent of the lowering path.
  std::vector<Violation> violations(const SolveResult& r) const;
  double eval(const RealExpr& e, const SolveResult& r) const;

  nlohmann::json to_json() const;
  static Program from_json(const nlohmann::json& j);

  int num_scalars() const { return static_cast<int>(scalar_names_.size()); }
  int num_hermitians() const { return static_cast<int>(herm_names_.size()); }
  int num_affine() const { return static_cast<int>(affine_.size()); }
  int num_exp_cones() const { return static_cast<int>(exp_.size()); }
  int num_psd_exprs() const { return static_cast<int>(psd_.size()); }

 private:
  struct AffineConstraint {
    RealExpr e;
    Sense sense;
  };
  struct ExpCone {
    RealExpr x, y, z;
  };

  StandardForm lower() const;
  void read_back(const class Lowering& lo, const IpmResult& ipm, SolveResult& out) const;

  std::vector<std::string> scalar_names_;
  std::vector<bool> scalar_nonneg_;
  std::vector<std::string> herm_names_;
  std::vector<int> herm_dims_;
  std::vector<bool> herm_psd_;
  std::vector<AffineConstraint> affine_;
  std::vector<HermExpr> psd_;
  std::vector<ExpCone> exp_;
  RealExpr objective_;
  bool maximize_ = false;

  friend class Lowering;
};

}  // namespace secrsma::conic
