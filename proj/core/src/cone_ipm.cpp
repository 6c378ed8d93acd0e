#include "cone_ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace irsmec::conic::detail {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack on the stopping rule when the iteration stalls before meeting it.
constexpr double kNearFactor = 10.0;

// Visits each block as (kind, offset, size); size is the vector length of the block.
enum class Kind { Lp, Soc, Psd };

template <typename F>
void for_each_block(const ConeDims& dims, F&& f) {
  int off = 0;
  if (dims.linear > 0) f(Kind::Lp, 0, off, dims.linear);
  off += dims.linear;
  for (std::size_t i = 0; i < dims.soc.size(); ++i) {
    f(Kind::Soc, static_cast<int>(i), off, dims.soc[i]);
    off += dims.soc[i];
  }
  for (std::size_t i = 0; i < dims.psd.size(); ++i) {
    const int m = dims.psd[i];
    f(Kind::Psd, static_cast<int>(i), off, m * m);
    off += m * m;
  }
}

double jdot(const VectorXd& u) { return u(0) * u(0) - u.tail(u.size() - 1).squaredNorm(); }

MatrixXd as_matrix(const VectorXd& u, int off, int m) {
  MatrixXd out = Eigen::Map<const MatrixXd>(u.data() + off, m, m);
  return 0.5 * (out + out.transpose());
}

void put_matrix(VectorXd& u, int off, const MatrixXd& mat) {
  Eigen::Map<MatrixXd>(u.data() + off, mat.rows(), mat.cols()) = mat;
}

// Smallest positive root of a t^2 + b t + c (c > 0); inf when none.
double first_positive_root(double a, double b, double c) {
  if (a == 0.0) return b < 0.0 ? -c / b : kInf;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return kInf;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double best = kInf;
  for (double r : {q / a, q != 0.0 ? c / q : kInf}) {
    if (r > 0.0) best = std::min(best, r);
  }
  return best;
}

// Factorization of the reduced KKT system for one scaling.
class KktSolver {
 public:
  bool factor(const StandardForm& p, const Scaling& w) {
    p_ = &p;
    w_ = &w;
    const int n = static_cast<int>(p.c.size());
    const int pe = static_cast<int>(p.b.size());
    ghat_ = scale_columns(p.G);
    if (!ghat_.allFinite()) return false;
    // QR of [Ghat; sqrt(delta) I] keeps the conditioning of Ghat rather than its square.
    const double scale = ghat_.colwise().norm().maxCoeff();
    const double root_delta = 1e-7 * std::max(1.0, scale);
    MatrixXd stacked(ghat_.rows() + n, n);
    stacked.topRows(ghat_.rows()) = ghat_;
    stacked.bottomRows(n) = root_delta * MatrixXd::Identity(n, n);
    const Eigen::ColPivHouseholderQR<MatrixXd> qr(stacked);
    r_ = qr.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
    perm_ = qr.colsPermutation().indices();
    if (pe > 0) {
      const MatrixXd hinv_at = solve_h(p.A.transpose());
      schur_.compute(p.A * hinv_at);
      if (!hinv_at.allFinite()) return false;
    }
    return true;
  }

  // Solves [0 A^T G^T; A 0 0; G 0 -W^T W] [ux; uy; uz] = [bx; by; bz].
  void solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& ux,
             VectorXd& uy, VectorXd& uz) const {
    solve_once(bx, by, bz, ux, uy, uz);
    for (int round = 0; round < 2; ++round) {
      const StandardForm& p = *p_;
      const VectorXd r1 = bx - p.A.transpose() * uy - p.G.transpose() * uz;
      const VectorXd r2 = by - p.A * ux;
      const VectorXd wtw =
          apply_scaling(p.dims, *w_, Apply::WT, apply_scaling(p.dims, *w_, Apply::W, uz));
      const VectorXd r3 = bz - p.G * ux + wtw;
      VectorXd cx, cy, cz;
      solve_once(r1, r2, r3, cx, cy, cz);
      ux += cx;
      uy += cy;
      uz += cz;
    }
  }

 private:
  void solve_once(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& ux,
                  VectorXd& uy, VectorXd& uz) const {
    const StandardForm& p = *p_;
    const int pe = static_cast<int>(p.b.size());
    const VectorXd t = apply_scaling(p.dims, *w_, Apply::WInvT, bz);
    const VectorXd rx = bx + ghat_.transpose() * t;
    if (pe > 0) {
      uy = schur_.solve(p.A * solve_h(rx) - by);
      ux = solve_h(rx - p.A.transpose() * uy);
    } else {
      uy = VectorXd::Zero(0);
      ux = solve_h(rx);
    }
    uz = apply_scaling(p.dims, *w_, Apply::WInv, ghat_ * ux - t);
  }

  // (R^T R)^-1 b with the permuted triangular factor.
  MatrixXd solve_h(const MatrixXd& b) const {
    MatrixXd y(b.rows(), b.cols());
    for (Eigen::Index i = 0; i < perm_.size(); ++i) y.row(i) = b.row(perm_(i));
    const auto r = r_.triangularView<Eigen::Upper>();
    r.transpose().solveInPlace(y);
    r.solveInPlace(y);
    MatrixXd out(b.rows(), b.cols());
    for (Eigen::Index i = 0; i < perm_.size(); ++i) out.row(perm_(i)) = y.row(i);
    return out;
  }

  // W^-T G, column by column; sparse PSD columns use outer products of R^-1 columns.
  MatrixXd scale_columns(const MatrixXd& g) const {
    const ConeDims& dims = p_->dims;
    MatrixXd out(g.rows(), g.cols());
    for_each_block(dims, [&](Kind kind, int idx, int off, int size) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        const VectorXd col = g.col(j).segment(off, size);
        switch (kind) {
          case Kind::Lp:
            out.col(j).segment(off, size) = col.cwiseQuotient(w_->lp_w);
            break;
          case Kind::Soc: {
            const auto& v = w_->soc_v[idx];
            VectorXd jv = v;
            jv.tail(size - 1) *= -1.0;
            VectorXd ju = col;
            ju.tail(size - 1) *= -1.0;
            out.col(j).segment(off, size) = (2.0 * jv * jv.dot(col) - ju) / w_->soc_beta[idx];
            break;
          }
          case Kind::Psd: {
            const int m = dims.psd[idx];
            const auto& rinv = w_->psd_rinv[idx];
            int nnz = 0;
            for (int e = 0; e < size; ++e) nnz += col(e) != 0.0;
            MatrixXd res;
            if (nnz <= m) {
              res = MatrixXd::Zero(m, m);
              for (int q = 0; q < m; ++q) {
                for (int pp = 0; pp < m; ++pp) {
                  const double val = col(q * m + pp);
                  if (val != 0.0) res.noalias() += val * rinv.col(pp) * rinv.col(q).transpose();
                }
              }
              res = 0.5 * (res + res.transpose()).eval();
            } else {
              res = rinv * as_matrix(col, 0, m) * rinv.transpose();
            }
            Eigen::Map<MatrixXd>(out.col(j).data() + off, m, m) = res;
            break;
          }
        }
      }
    });
    return out;
  }

  const StandardForm* p_ = nullptr;
  const Scaling* w_ = nullptr;
  MatrixXd ghat_;
  MatrixXd r_;
  Eigen::VectorXi perm_;
  Eigen::PartialPivLU<MatrixXd> schur_;
};

}  // namespace

int ConeDims::total() const {
  int t = linear;
  for (int q : soc) t += q;
  for (int m : psd) t += m * m;
  return t;
}

int ConeDims::degree() const {
  int d = linear + static_cast<int>(soc.size());
  for (int m : psd) d += m;
  return d;
}

bool compute_scaling(const ConeDims& dims, const VectorXd& s, const VectorXd& z, Scaling& out) {
  out = Scaling{};
  out.lambda.resize(s.size());
  out.soc_beta.resize(dims.soc.size());
  out.soc_v.resize(dims.soc.size());
  out.psd_r.resize(dims.psd.size());
  out.psd_rinv.resize(dims.psd.size());
  bool ok = true;
  for_each_block(dims, [&](Kind kind, int idx, int off, int size) {
    if (!ok) return;
    const VectorXd sb = s.segment(off, size);
    const VectorXd zb = z.segment(off, size);
    switch (kind) {
      case Kind::Lp:
        if ((sb.array() <= 0.0).any() || (zb.array() <= 0.0).any()) {
          ok = false;
          return;
        }
        out.lp_w = (sb.array() / zb.array()).sqrt();
        out.lambda.segment(off, size) = (sb.array() * zb.array()).sqrt();
        break;
      case Kind::Soc: {
        const double js = jdot(sb);
        const double jz = jdot(zb);
        if (!(js > 0.0 && jz > 0.0 && sb(0) > 0.0 && zb(0) > 0.0)) {
          ok = false;
          return;
        }
        const double a = std::sqrt(js);
        const double b = std::sqrt(jz);
        const VectorXd sbar = sb / a;
        const VectorXd zbar = zb / b;
        const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
        VectorXd wbar = sbar;
        wbar(0) += zbar(0);
        wbar.tail(size - 1) -= zbar.tail(size - 1);
        wbar /= 2.0 * gamma;
        VectorXd v = wbar;
        v(0) += 1.0;
        v /= std::sqrt(2.0 * (wbar(0) + 1.0));
        out.soc_beta[idx] = std::sqrt(a / b);
        out.soc_v[idx] = v;
        VectorXd jz_vec = zb;
        jz_vec.tail(size - 1) *= -1.0;
        out.lambda.segment(off, size) = out.soc_beta[idx] * (2.0 * v * v.dot(zb) - jz_vec);
        break;
      }
      case Kind::Psd: {
        const int m = dims.psd[idx];
        const MatrixXd smat = as_matrix(s, off, m);
        const MatrixXd zmat = as_matrix(z, off, m);
        Eigen::LLT<MatrixXd> llt(smat);
        if (llt.info() != Eigen::Success) {
          ok = false;
          return;
        }
        const MatrixXd l = llt.matrixL();
        const MatrixXd lzl = l.transpose() * zmat * l;
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (lzl + lzl.transpose()));
        if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
          ok = false;
          return;
        }
        const VectorXd lam = eig.eigenvalues().cwiseSqrt();
        const VectorXd lam_isqrt = lam.cwiseSqrt().cwiseInverse();
        const MatrixXd& q = eig.eigenvectors();
        out.psd_r[idx] = l * q * lam_isqrt.asDiagonal();
        const MatrixXd linv = l.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(m, m));
        out.psd_rinv[idx] = lam.cwiseSqrt().asDiagonal() * q.transpose() * linv;
        put_matrix(out.lambda, off, MatrixXd(lam.asDiagonal()));
        break;
      }
    }
  });
  return ok && out.lambda.allFinite();
}

VectorXd apply_scaling(const ConeDims& dims, const Scaling& w, Apply op, const VectorXd& u) {
  VectorXd out(u.size());
  for_each_block(dims, [&](Kind kind, int idx, int off, int size) {
    const VectorXd ub = u.segment(off, size);
    switch (kind) {
      case Kind::Lp:
        if (op == Apply::W || op == Apply::WT) {
          out.segment(off, size) = ub.cwiseProduct(w.lp_w);
        } else {
          out.segment(off, size) = ub.cwiseQuotient(w.lp_w);
        }
        break;
      case Kind::Soc: {
        const auto& v = w.soc_v[idx];
        const double beta = w.soc_beta[idx];
        VectorXd ju = ub;
        ju.tail(size - 1) *= -1.0;
        if (op == Apply::W || op == Apply::WT) {
          out.segment(off, size) = beta * (2.0 * v * v.dot(ub) - ju);
        } else {
          VectorXd jv = v;
          jv.tail(size - 1) *= -1.0;
          out.segment(off, size) = (2.0 * jv * jv.dot(ub) - ju) / beta;
        }
        break;
      }
      case Kind::Psd: {
        const int m = dims.psd[idx];
        const MatrixXd umat = as_matrix(u, off, m);
        const MatrixXd& r = w.psd_r[idx];
        const MatrixXd& rinv = w.psd_rinv[idx];
        MatrixXd res;
        switch (op) {
          case Apply::W: res = r.transpose() * umat * r; break;
          case Apply::WT: res = r * umat * r.transpose(); break;
          case Apply::WInv: res = rinv.transpose() * umat * rinv; break;
          case Apply::WInvT: res = rinv * umat * rinv.transpose(); break;
        }
        put_matrix(out, off, res);
        break;
      }
    }
  });
  return out;
}

VectorXd jordan_product(const ConeDims& dims, const VectorXd& u, const VectorXd& v) {
  VectorXd out(u.size());
  for_each_block(dims, [&](Kind kind, int idx, int off, int size) {
    const auto ub = u.segment(off, size);
    const auto vb = v.segment(off, size);
    switch (kind) {
      case Kind::Lp: out.segment(off, size) = ub.cwiseProduct(vb); break;
      case Kind::Soc:
        out(off) = ub.dot(vb);
        out.segment(off + 1, size - 1) =
            ub(0) * vb.tail(size - 1) + vb(0) * ub.tail(size - 1);
        break;
      case Kind::Psd: {
        const int m = dims.psd[idx];
        const MatrixXd a = as_matrix(u, off, m);
        const MatrixXd b = as_matrix(v, off, m);
        put_matrix(out, off, 0.5 * (a * b + b * a));
        break;
      }
    }
  });
  return out;
}

VectorXd jordan_divide(const ConeDims& dims, const VectorXd& lambda, const VectorXd& u) {
  VectorXd out(u.size());
  for_each_block(dims, [&](Kind kind, int idx, int off, int size) {
    const auto lb = lambda.segment(off, size);
    const auto ub = u.segment(off, size);
    switch (kind) {
      case Kind::Lp: out.segment(off, size) = ub.cwiseQuotient(lb); break;
      case Kind::Soc: {
        const double det = lb(0) * lb(0) - lb.tail(size - 1).squaredNorm();
        const double x0 = (lb(0) * ub(0) - lb.tail(size - 1).dot(ub.tail(size - 1))) / det;
        out(off) = x0;
        out.segment(off + 1, size - 1) = (ub.tail(size - 1) - x0 * lb.tail(size - 1)) / lb(0);
        break;
      }
      case Kind::Psd: {
        const int m = dims.psd[idx];
        const MatrixXd umat = as_matrix(u, off, m);
        MatrixXd res(m, m);
        for (int j = 0; j < m; ++j) {
          for (int i = 0; i < m; ++i) {
            res(i, j) = 2.0 * umat(i, j) / (lambda(off + i * m + i) + lambda(off + j * m + j));
          }
        }
        put_matrix(out, off, res);
        break;
      }
    }
  });
  return out;
}

VectorXd identity_element(const ConeDims& dims) {
  VectorXd e = VectorXd::Zero(dims.total());
  for_each_block(dims, [&](Kind kind, int idx, int off, int size) {
    switch (kind) {
      case Kind::Lp: e.segment(off, size).setOnes(); break;
      case Kind::Soc: e(off) = 1.0; break;
      case Kind::Psd:
        for (int i = 0; i < dims.psd[idx]; ++i) e(off + i * dims.psd[idx] + i) = 1.0;
        break;
    }
  });
  return e;
}

double max_step(const ConeDims& dims, const VectorXd& lambda, const VectorXd& d) {
  double alpha = kInf;
  for_each_block(dims, [&](Kind kind, int idx, int off, int size) {
    const auto lb = lambda.segment(off, size);
    const auto db = d.segment(off, size);
    switch (kind) {
      case Kind::Lp:
        for (int i = 0; i < size; ++i) {
          if (db(i) < 0.0) alpha = std::min(alpha, -lb(i) / db(i));
        }
        break;
      case Kind::Soc: {
        const double a = db(0) * db(0) - db.tail(size - 1).squaredNorm();
        const double b = 2.0 * (lb(0) * db(0) - lb.tail(size - 1).dot(db.tail(size - 1)));
        const double c = lb(0) * lb(0) - lb.tail(size - 1).squaredNorm();
        alpha = std::min(alpha, first_positive_root(a, b, c));
        break;
      }
      case Kind::Psd: {
        const int m = dims.psd[idx];
        const MatrixXd dm = as_matrix(d, off, m);
        VectorXd isq(m);
        for (int i = 0; i < m; ++i) isq(i) = 1.0 / std::sqrt(lambda(off + i * m + i));
        const MatrixXd scaled = isq.asDiagonal() * dm * isq.asDiagonal();
        const double mn = Eigen::SelfAdjointEigenSolver<MatrixXd>(scaled, Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff();
        if (mn < 0.0) alpha = std::min(alpha, -1.0 / mn);
        break;
      }
    }
  });
  return alpha;
}

double interior_offset(const ConeDims& dims, const VectorXd& u) {
  double t = -kInf;
  for_each_block(dims, [&](Kind kind, int idx, int off, int size) {
    const auto ub = u.segment(off, size);
    switch (kind) {
      case Kind::Lp: t = std::max(t, -ub.minCoeff()); break;
      case Kind::Soc: t = std::max(t, ub.tail(size - 1).norm() - ub(0)); break;
      case Kind::Psd: {
        const MatrixXd mat = as_matrix(u, off, dims.psd[idx]);
        t = std::max(t, -Eigen::SelfAdjointEigenSolver<MatrixXd>(mat, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff());
        break;
      }
    }
  });
  return t;
}

IpmResult solve_standard_form(const StandardForm& p, const IpmSettings& st) {
  const ConeDims& dims = p.dims;
  const int n = static_cast<int>(p.c.size());
  const int pe = static_cast<int>(p.b.size());
  const VectorXd e = identity_element(dims);
  IpmResult res;

  // Least-squares start with W = I, then shift into the interior.
  Scaling ident;
  ident.lp_w = VectorXd::Ones(dims.linear);
  for (int q : dims.soc) {
    ident.soc_beta.push_back(1.0);
    ident.soc_v.push_back(VectorXd::Unit(q, 0));
  }
  for (int m : dims.psd) {
    ident.psd_r.push_back(MatrixXd::Identity(m, m));
    ident.psd_rinv.push_back(MatrixXd::Identity(m, m));
  }
  KktSolver kkt;
  kkt.factor(p, ident);
  VectorXd x, y, z, s, tmp_y, tmp_x;
  kkt.solve(VectorXd::Zero(n), p.b, p.h, x, tmp_y, s);
  s = -s;
  kkt.solve(-p.c, VectorXd::Zero(pe), VectorXd::Zero(p.h.size()), tmp_x, y, z);
  const double ts = interior_offset(dims, s);
  const double tz = interior_offset(dims, z);
  if (ts >= -1e-8 * std::max(s.norm(), 1.0)) s += (1.0 + ts) * e;
  if (tz >= -1e-8 * std::max(z.norm(), 1.0)) z += (1.0 + tz) * e;
  double tau = 1.0;
  double kappa = 1.0;

  const double resx0 = std::max(1.0, p.c.norm());
  const double resy0 = std::max(1.0, p.b.norm());
  const double resz0 = std::max(1.0, p.h.norm());
  const double degree = dims.degree();
  int stalled = 0;
  // Best iterate meeting the residual tolerances, kept for a near-optimal exit on stalls.
  IpmResult best;
  double best_gap_ratio = kInf;

  for (int iter = 0;; ++iter) {
    res.iterations = iter;
    const VectorXd aty_gtz = p.A.transpose() * y + p.G.transpose() * z;
    const VectorXd ax = p.A * x;
    const VectorXd gxs = p.G * x + s;
    const VectorXd r1 = aty_gtz + tau * p.c;
    const VectorXd r2 = ax - tau * p.b;
    const VectorXd r3 = gxs - tau * p.h;
    const double cx = p.c.dot(x);
    const double by = p.b.dot(y);
    const double hz = p.h.dot(z);
    const double r4 = kappa + cx + by + hz;
    const double gap = s.dot(z);
    const double mu = (gap + kappa * tau) / (degree + 1.0);

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double gap_n = gap / (tau * tau);
    double relgap = kInf;
    if (pcost < 0.0) relgap = gap_n / -pcost;
    else if (dcost > 0.0) relgap = gap_n / dcost;
    const double pres = std::max(r2.norm() / tau / resy0, r3.norm() / tau / resz0);
    const double dres = r1.norm() / tau / resx0;
    const double pinfres = (hz + by < 0.0) ? aty_gtz.norm() / resx0 / -(hz + by) : kInf;
    const double dinfres =
        (cx < 0.0) ? std::max(ax.norm() / resy0, gxs.norm() / resz0) / -cx : kInf;

    if (pres <= st.feastol && dres <= st.feastol && (gap_n <= st.abstol || relgap <= st.reltol)) {
      res.status = Status::Optimal;
      res.x = x / tau;
      res.y = y / tau;
      res.s = s / tau;
      res.z = z / tau;
      return res;
    }
    const double gap_ratio = std::min(gap_n / st.abstol, relgap / st.reltol);
    if (pres <= kNearFactor * st.feastol && dres <= kNearFactor * st.feastol &&
        gap_ratio < best_gap_ratio) {
      best_gap_ratio = gap_ratio;
      best.x = x / tau;
      best.y = y / tau;
      best.s = s / tau;
      best.z = z / tau;
      best.iterations = iter;
    }
    if (pinfres <= st.feastol) {
      res.status = Status::Infeasible;
      res.x = x;
      res.s = s;
      res.y = y / -(hz + by);
      res.z = z / -(hz + by);
      return res;
    }
    if (dinfres <= st.feastol) {
      res.status = Status::Unbounded;
      res.x = x / -cx;
      res.s = s / -cx;
      res.y = y;
      res.z = z;
      return res;
    }
    if (iter >= st.max_iterations || stalled >= 3) break;

    Scaling w;
    if (!compute_scaling(dims, s, z, w) || !kkt.factor(p, w)) break;
    const VectorXd& lambda = w.lambda;
    const VectorXd lambda_sq = jordan_product(dims, lambda, lambda);

    VectorXd u1x, u1y, u1z;
    kkt.solve(-p.c, p.b, p.h, u1x, u1y, u1z);
    const double qu1 = p.c.dot(u1x) + p.b.dot(u1y) + p.h.dot(u1z);

    VectorXd dx, dy, dz, ds_scaled, dz_scaled;
    double dtau = 0.0, dkappa = 0.0, alpha = 0.0;
    VectorXd ds_aff, dz_aff;
    double dtau_aff = 0.0, dkappa_aff = 0.0;
    double sigma = 0.0;
    for (int phase = 0; phase < 2; ++phase) {
      double eta = 1.0;
      VectorXd dsc = -lambda_sq;
      double dk = -kappa * tau;
      if (phase == 1) {
        eta = 1.0 - sigma;
        dsc += sigma * mu * e - jordan_product(dims, ds_aff, dz_aff);
        dk += sigma * mu - dtau_aff * dkappa_aff;
      }
      const VectorXd lam_dsc = jordan_divide(dims, lambda, dsc);
      VectorXd u0x, u0y, u0z;
      kkt.solve(-eta * r1, -eta * r2,
                -eta * r3 - apply_scaling(dims, w, Apply::WT, lam_dsc), u0x, u0y, u0z);
      const double qu0 = p.c.dot(u0x) + p.b.dot(u0y) + p.h.dot(u0z);
      dtau = (-eta * r4 - dk / tau - qu0) / (qu1 - kappa / tau);
      dx = u0x + dtau * u1x;
      dy = u0y + dtau * u1y;
      dz = u0z + dtau * u1z;
      dkappa = (dk - kappa * dtau) / tau;
      dz_scaled = apply_scaling(dims, w, Apply::W, dz);
      ds_scaled = lam_dsc - dz_scaled;

      double amax = std::min(max_step(dims, lambda, ds_scaled), max_step(dims, lambda, dz_scaled));
      if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
      if (dkappa < 0.0) amax = std::min(amax, -kappa / dkappa);
      if (phase == 0) {
        const double aff = std::min(1.0, amax);
        sigma = std::pow(1.0 - aff, 3);
        ds_aff = ds_scaled;
        dz_aff = dz_scaled;
        dtau_aff = dtau;
        dkappa_aff = dkappa;
      } else {
        alpha = std::min(1.0, 0.99 * amax);
      }
    }
    if (!dx.allFinite() || !dz.allFinite() || !std::isfinite(dtau)) break;
    stalled = alpha < 1e-10 ? stalled + 1 : 0;
    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * apply_scaling(dims, w, Apply::WT, ds_scaled);
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }

  if (best_gap_ratio <= kNearFactor) {
    best.status = Status::Optimal;
    return best;
  }
  res.status = Status::NumericalFailure;
  res.x = x / tau;
  res.y = y / tau;
  res.s = s / tau;
  res.z = z / tau;
  return res;
}

}  // namespace irsmec::conic::detail
