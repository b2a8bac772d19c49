#include "secrsma/conic/program.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace secrsma::conic {

using nlohmann::json;

int Program::add_scalar(const std::string& name, bool nonneg) {
  scalar_names_.push_back(name);
  scalar_nonneg_.push_back(nonneg);
  return static_cast<int>(scalar_names_.size()) - 1;
}

int Program::add_hermitian(const std::string& name, int dim, bool psd) {
  if (dim < 1) throw std::invalid_argument("matrix variable needs dim >= 1");
  herm_names_.push_back(name);
  herm_dims_.push_back(dim);
  herm_psd_.push_back(psd);
  return static_cast<int>(herm_names_.size()) - 1;
}

int Program::scalar_id(const std::string& name) const {
  for (int i = 0; i < num_scalars(); ++i)
    if (scalar_names_[i] == name) return i;
  throw std::invalid_argument("unknown scalar variable " + name);
}

int Program::hermitian_id(const std::string& name) const {
  for (int i = 0; i < num_hermitians(); ++i)
    if (herm_names_[i] == name) return i;
  throw std::invalid_argument("unknown matrix variable " + name);
}

namespace {

void check_herm_coeffs(const RealExpr& e, const std::vector<int>& dims) {
  for (const auto& [id, c] : e.matrices) {
    if (id < 0 || id >= static_cast<int>(dims.size()))
      throw std::invalid_argument("matrix coefficient for undeclared variable");
    if (c.rows() != dims[id] || c.cols() != dims[id])
      throw std::invalid_argument("matrix coefficient dimension mismatch");
  }
}

}  // namespace

void Program::add_constraint(RealExpr e, Sense sense) {
  check_herm_coeffs(e, herm_dims_);
  affine_.push_back({std::move(e), sense});
}

void Program::add_psd(HermExpr e) {
  if (e.dim < 1) throw std::invalid_argument("psd expression needs dim >= 1");
  for (const auto& [id, a] : e.herm_terms) {
    if (id < 0 || id >= num_hermitians())
      throw std::invalid_argument("psd expression references undeclared variable");
    if (herm_dims_[id] != e.dim)
      throw std::invalid_argument("psd expression dimension mismatch");
  }
  for (const auto& [id, c] : e.scalar_terms)
    if (c.rows() != e.dim || c.cols() != e.dim)
      throw std::invalid_argument("psd expression coefficient dimension mismatch");
  psd_.push_back(std::move(e));
}

void Program::add_exp_cone(RealExpr x, RealExpr y, RealExpr z) {
  check_herm_coeffs(x, herm_dims_);
  check_herm_coeffs(y, herm_dims_);
  check_herm_coeffs(z, herm_dims_);
  exp_.push_back({std::move(x), std::move(y), std::move(z)});
}

void Program::add_log2_lower_bound(const RealExpr& a, const RealExpr& t) {
  add_exp_cone(t * M_LN2, RealExpr::lit(1.0), a);
}

void Program::set_objective(RealExpr e, bool maximize) {
  check_herm_coeffs(e, herm_dims_);
  objective_ = std::move(e);
  maximize_ = maximize;
}

/// Assigns every variable a place in the standard form parameter vector and
/// materializes the constraint rows.
class Lowering {
 public:
  explicit Lowering(const Program& p) : p_(p) {
    ConeLayout& lay = sf.cones;
    scalar_param.resize(p.num_scalars(), -1);
    herm_param.resize(p.num_hermitians(), -1);

    int free_cursor = 0;
    for (int i = 0; i < p.num_scalars(); ++i)
      if (!p.scalar_nonneg_[i]) scalar_param[i] = free_cursor++;
    std::vector<int> free_herm;
    for (int i = 0; i < p.num_hermitians(); ++i)
      if (!p.herm_psd_[i]) {
        herm_param[i] = free_cursor;
        free_cursor += p.herm_dims_[i] * p.herm_dims_[i];
        free_herm.push_back(i);
      }
    lay.n_free = free_cursor;

    int nonneg_cursor = 0;
    for (int i = 0; i < p.num_scalars(); ++i)
      if (p.scalar_nonneg_[i]) {
        scalar_param[i] = -1;  // resolved after n_free known
        nonneg_index.push_back(i);
        ++nonneg_cursor;
      }
    slack_base = nonneg_cursor;
    for (const auto& con : p.affine_)
      if (con.sense != Sense::eq) ++nonneg_cursor;
    lay.n_nonneg = nonneg_cursor;
    for (int j = 0; j < static_cast<int>(nonneg_index.size()); ++j)
      scalar_param[nonneg_index[j]] = lay.n_free + j;

    for (int i = 0; i < p.num_hermitians(); ++i)
      if (p.herm_psd_[i]) {
        herm_block.push_back(i);
        lay.herm_dims.push_back(p.herm_dims_[i]);
      }
    psd_slack_block = static_cast<int>(lay.herm_dims.size());
    for (const auto& e : p.psd_) lay.herm_dims.push_back(e.dim);
    for (int b = 0; b < static_cast<int>(herm_block.size()); ++b)
      herm_param[herm_block[b]] = lay.herm_offset(b);

    lay.n_exp = p.num_exp_cones();

    int m = p.num_affine();
    for (const auto& e : p.psd_) m += e.dim * e.dim;
    m += 3 * p.num_exp_cones();

    const int n = lay.total();
    sf.A = RMat::Zero(m, n);
    sf.b = RVec::Zero(m);
    sf.c = RVec::Zero(n);

    int row = 0;
    int slack = slack_base;
    for (const auto& con : p.affine_) {
      fill_row(sf.A.row(row), con.e);
      sf.b(row) = -con.e.constant;
      if (con.sense == Sense::le)
        sf.A(row, lay.nonneg_offset() + slack++) = 1.0;
      else if (con.sense == Sense::ge)
        sf.A(row, lay.nonneg_offset() + slack++) = -1.0;
      ++row;
    }
    for (int j = 0; j < p.num_psd_exprs(); ++j) {
      const HermExpr& e = p.psd_[j];
      const int d = e.dim;
      const int nn = d * d;
      const int s_off = lay.herm_offset(psd_slack_block + j);
      RVec buf(nn);
      svec_into(e.constant, buf.data());
      for (int q = 0; q < nn; ++q) {
        sf.A(row + q, s_off + q) = 1.0;
        sf.b(row + q) = buf(q);
      }
      for (const auto& [sid, B] : e.scalar_terms) {
        svec_into(B, buf.data());
        for (int q = 0; q < nn; ++q) sf.A(row + q, scalar_param[sid]) -= buf(q);
      }
      for (const auto& [hid, a] : e.herm_terms)
        for (int q = 0; q < nn; ++q) sf.A(row + q, herm_param[hid] + q) -= a;
      row += nn;
    }
    for (int t = 0; t < p.num_exp_cones(); ++t) {
      const auto& cone = p.exp_[t];
      const RealExpr* comps[3] = {&cone.x, &cone.y, &cone.z};
      for (int q = 0; q < 3; ++q) {
        fill_row(sf.A.row(row), *comps[q]);
        sf.A(row, lay.exp_offset(t) + q) -= 1.0;
        sf.b(row) = -comps[q]->constant;
        ++row;
      }
    }

    fill_c(p.objective_, p.maximize_ ? -1.0 : 1.0);
  }

  template <typename Row>
  void fill_row(Row row, const RealExpr& e) const {
    for (const auto& [id, coef] : e.scalars) row(scalar_param[id]) += coef;
    for (const auto& [id, C] : e.matrices) {
      RVec buf(C.rows() * C.cols());
      svec_into(C, buf.data());
      for (int q = 0; q < buf.size(); ++q) row(herm_param[id] + q) += buf(q);
    }
  }

  void fill_c(const RealExpr& e, double sign) {
    for (const auto& [id, coef] : e.scalars) sf.c(scalar_param[id]) += sign * coef;
    for (const auto& [id, C] : e.matrices) {
      RVec buf(C.rows() * C.cols());
      svec_into(C, buf.data());
      for (int q = 0; q < buf.size(); ++q) sf.c(herm_param[id] + q) += sign * buf(q);
    }
  }

  StandardForm sf;
  std::vector<int> scalar_param;  // param index of each scalar variable
  std::vector<int> herm_param;    // first param index of each matrix variable
  std::vector<int> nonneg_index;
  std::vector<int> herm_block;
  int slack_base = 0;
  int psd_slack_block = 0;

 private:
  const Program& p_;
};

SolveResult Program::solve(const SolveOptions& opt) const {
  Lowering lo(*this);
  IpmOptions iopt;
  iopt.tol = opt.tol;
  iopt.max_iters = opt.max_iters;
  iopt.verbosity = opt.verbosity;
  IpmResult ipm = solve_standard_form(lo.sf, iopt);
  SolveResult out;
  out.status = ipm.status;
  out.primal_res = ipm.primal_res;
  out.dual_res = ipm.dual_res;
  out.gap = ipm.rel_gap;
  out.iterations = ipm.iters;
  read_back(lo, ipm, out);
  return out;
}

void Program::read_back(const Lowering& lo, const IpmResult& ipm, SolveResult& out) const {
  if (ipm.x.size() == 0) return;
  for (int i = 0; i < num_scalars(); ++i)
    out.scalars[scalar_names_[i]] = ipm.x(lo.scalar_param[i]);
  for (int i = 0; i < num_hermitians(); ++i)
    out.matrices[herm_names_[i]] = unsvec(ipm.x.data() + lo.herm_param[i], herm_dims_[i]);
  double lin = (maximize_ ? -1.0 : 1.0) * lo.sf.c.dot(ipm.x);
  out.objective = objective_.constant + lin;
}

double Program::eval(const RealExpr& e, const SolveResult& r) const {
  double v = e.constant;
  for (const auto& [id, coef] : e.scalars) v += coef * r.scalars.at(scalar_names_[id]);
  for (const auto& [id, C] : e.matrices) v += herm_inner(C, r.matrices.at(herm_names_[id]));
  return v;
}

std::vector<Violation> Program::violations(const SolveResult& r) const {
  std::vector<Violation> out;
  for (int i = 0; i < num_scalars(); ++i)
    if (scalar_nonneg_[i])
      out.push_back({"nonneg " + scalar_names_[i],
                     std::max(0.0, -r.scalars.at(scalar_names_[i]))});
  for (int i = 0; i < num_hermitians(); ++i)
    if (herm_psd_[i]) {
      Eigen::SelfAdjointEigenSolver<CMat> eig(r.matrices.at(herm_names_[i]));
      out.push_back({"psd " + herm_names_[i], std::max(0.0, -eig.eigenvalues().minCoeff())});
    }
  for (int i = 0; i < num_affine(); ++i) {
    double v = eval(affine_[i].e, r);
    double amount = 0.0;
    switch (affine_[i].sense) {
      case Sense::le: amount = std::max(0.0, v); break;
      case Sense::ge: amount = std::max(0.0, -v); break;
      case Sense::eq: amount = std::abs(v); break;
    }
    out.push_back({"affine[" + std::to_string(i) + "]", amount});
  }
  for (int j = 0; j < num_psd_exprs(); ++j) {
    const HermExpr& e = psd_[j];
    CMat val = e.constant;
    for (const auto& [sid, B] : e.scalar_terms) val += r.scalars.at(scalar_names_[sid]) * B;
    for (const auto& [hid, a] : e.herm_terms) val += a * r.matrices.at(herm_names_[hid]);
    Eigen::SelfAdjointEigenSolver<CMat> eig(val);
    out.push_back({"psd_expr[" + std::to_string(j) + "]",
                   std::max(0.0, -eig.eigenvalues().minCoeff())});
  }
  for (int t = 0; t < num_exp_cones(); ++t) {
    double x = eval(exp_[t].x, r);
    double y = eval(exp_[t].y, r);
    double z = eval(exp_[t].z, r);
    double amount;
    if (y <= 0.0)
      amount = -y + std::max(0.0, -z);
    else
      amount = std::max(0.0, y * std::exp(x / y) - z);
    out.push_back({"exp[" + std::to_string(t) + "]", amount});
  }
  return out;
}

namespace {

json expr_to_json(const RealExpr& e, const std::vector<std::string>& scalar_names,
                  const std::vector<std::string>& herm_names) {
  json j;
  j["const"] = e.constant;
  json sc = json::array();
  for (const auto& [id, coef] : e.scalars)
    sc.push_back({{"var", scalar_names[id]}, {"coef", coef}});
  j["scalars"] = sc;
  json mats = json::array();
  for (const auto& [id, C] : e.matrices) {
    json trip = json::array();
    for (int c = 0; c < C.cols(); ++c)
      for (int rw = 0; rw <= c; ++rw) {
        cplx v = C(rw, c);
        if (v != cplx(0.0, 0.0)) trip.push_back({rw, c, v.real(), v.imag()});
      }
    mats.push_back({{"var", herm_names[id]}, {"triplets", trip}});
  }
  j["matrices"] = mats;
  return j;
}

RealExpr expr_from_json(const json& j, const Program& p, const std::vector<int>& dims) {
  RealExpr e;
  e.constant = j.at("const").get<double>();
  for (const auto& s : j.at("scalars"))
    e.scalars[p.scalar_id(s.at("var").get<std::string>())] +=
        s.at("coef").get<double>();
  for (const auto& mjson : j.at("matrices")) {
    int id = p.hermitian_id(mjson.at("var").get<std::string>());
    CMat C = CMat::Zero(dims[id], dims[id]);
    for (const auto& t : mjson.at("triplets")) {
      int rw = t.at(0).get<int>();
      int c = t.at(1).get<int>();
      cplx v(t.at(2).get<double>(), t.at(3).get<double>());
      C(rw, c) = v;
      if (rw != c) C(c, rw) = std::conj(v);
    }
    e.matrices[id] = C;
  }
  return e;
}

json herm_matrix_to_json(const CMat& C) {
  json trip = json::array();
  for (int c = 0; c < C.cols(); ++c)
    for (int rw = 0; rw <= c; ++rw) {
      cplx v = C(rw, c);
      if (v != cplx(0.0, 0.0)) trip.push_back({rw, c, v.real(), v.imag()});
    }
  return trip;
}

CMat herm_matrix_from_json(const json& trip, int dim) {
  CMat C = CMat::Zero(dim, dim);
  for (const auto& t : trip) {
    int rw = t.at(0).get<int>();
    int c = t.at(1).get<int>();
    cplx v(t.at(2).get<double>(), t.at(3).get<double>());
    C(rw, c) = v;
    if (rw != c) C(c, rw) = std::conj(v);
  }
  return C;
}

const char* sense_name(Sense s) {
  switch (s) {
    case Sense::le: return "le";
    case Sense::ge: return "ge";
    case Sense::eq: return "eq";
  }
  return "?";
}

Sense sense_from(const std::string& s) {
  if (s == "le") return Sense::le;
  if (s == "ge") return Sense::ge;
  if (s == "eq") return Sense::eq;
  throw std::invalid_argument("unknown sense " + s);
}

}  // namespace

json Program::to_json() const {
  json j;
  j["format"] = "conic-program/1";
  json sc = json::array();
  for (int i = 0; i < num_scalars(); ++i)
    sc.push_back({{"name", scalar_names_[i]}, {"nonneg", (bool)scalar_nonneg_[i]}});
  j["scalars"] = sc;
  json hm = json::array();
  for (int i = 0; i < num_hermitians(); ++i)
    hm.push_back({{"name", herm_names_[i]}, {"dim", herm_dims_[i]}, {"psd", (bool)herm_psd_[i]}});
  j["hermitians"] = hm;
  j["objective"] = {{"maximize", maximize_},
                    {"expr", expr_to_json(objective_, scalar_names_, herm_names_)}};
  json aff = json::array();
  for (const auto& con : affine_)
    aff.push_back({{"sense", sense_name(con.sense)},
                   {"expr", expr_to_json(con.e, scalar_names_, herm_names_)}});
  j["affine"] = aff;
  json psd = json::array();
  for (const auto& e : psd_) {
    json scalar_terms = json::array();
    for (const auto& [sid, B] : e.scalar_terms)
      scalar_terms.push_back({{"var", scalar_names_[sid]}, {"coef", herm_matrix_to_json(B)}});
    json herm_terms = json::array();
    for (const auto& [hid, a] : e.herm_terms)
      herm_terms.push_back({{"var", herm_names_[hid]}, {"coef", a}});
    psd.push_back({{"dim", e.dim},
                   {"constant", herm_matrix_to_json(e.constant)},
                   {"scalar_terms", scalar_terms},
                   {"herm_terms", herm_terms}});
  }
  j["psd"] = psd;
  json ex = json::array();
  for (const auto& cone : exp_)
    ex.push_back({{"x", expr_to_json(cone.x, scalar_names_, herm_names_)},
                  {"y", expr_to_json(cone.y, scalar_names_, herm_names_)},
                  {"z", expr_to_json(cone.z, scalar_names_, herm_names_)}});
  j["exp"] = ex;
  return j;
}

Program Program::from_json(const json& j) {
  if (j.at("format").get<std::string>() != "conic-program/1")
    throw std::invalid_argument("unsupported program format");
  Program p;
  for (const auto& s : j.at("scalars"))
    p.add_scalar(s.at("name").get<std::string>(), s.at("nonneg").get<bool>());
  for (const auto& h : j.at("hermitians"))
    p.add_hermitian(h.at("name").get<std::string>(), h.at("dim").get<int>(),
                    h.at("psd").get<bool>());
  for (const auto& con : j.at("affine"))
    p.add_constraint(expr_from_json(con.at("expr"), p, p.herm_dims_),
                     sense_from(con.at("sense").get<std::string>()));
  for (const auto& e : j.at("psd")) {
    HermExpr he;
    he.dim = e.at("dim").get<int>();
    he.constant = herm_matrix_from_json(e.at("constant"), he.dim);
    for (const auto& st : e.at("scalar_terms"))
      he.scalar_terms[p.scalar_id(st.at("var").get<std::string>())] =
          herm_matrix_from_json(st.at("coef"), he.dim);
    for (const auto& ht : e.at("herm_terms"))
      he.herm_terms[p.hermitian_id(ht.at("var").get<std::string>())] =
          ht.at("coef").get<double>();
    p.add_psd(std::move(he));
  }
  for (const auto& cone : j.at("exp"))
    p.add_exp_cone(expr_from_json(cone.at("x"), p, p.herm_dims_),
                   expr_from_json(cone.at("y"), p, p.herm_dims_),
                   expr_from_json(cone.at("z"), p, p.herm_dims_));
  const auto& obj = j.at("objective");
  p.set_objective(expr_from_json(obj.at("expr"), p, p.herm_dims_),
                  obj.at("maximize").get<bool>());
  return p;
}

}  // namespace secrsma::conic
