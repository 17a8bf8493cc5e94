// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include "ame/encoders/encoders.hpp"

#include <cmath>
#include <string>

#include "ame/error.hpp"
#include "ame/numerics/ops.hpp"

namespace ame {

std::string_view to_string(Mode mode) { return mode == Mode::Symmetric ? "symmetric" : "asymmetric"; }

Mode parse_mode(std::string_view text) {
  if (text == "symmetric") return Mode::Symmetric;
  if (text == "asymmetric") return Mode::Asymmetric;
  throw ConfigError("unknown similarity mode '" + std::string(text) + "'");
}

namespace {

const Tensor& val(const ParamSet& p, std::string_view name) { return p.value(std::string(name)); }
Tensor& grd(ParamSet& p, std::string_view name) { return p.grad(std::string(name)); }

Tensor uniform(Shape shape, double bound, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& x : t.values()) x = dist(rng);
  return t;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// out = b + W x + U h
void affine2(const Tensor& w, std::span<const double> x, const Tensor& u, std::span<const double> h,
             const Tensor& b, std::vector<double>& out) {
  const std::size_t m = w.rows();
  out.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = b[i];
    const auto wr = w.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) acc += wr[j] * x[j];
    const auto ur = u.row(i);
    for (std::size_t j = 0; j < h.size(); ++j) acc += ur[j] * h[j];
    out[i] = acc;
  }
}

// g += a b^T
void add_outer(Tensor& g, std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    auto row = g.row(i);
    for (std::size_t j = 0; j < b.size(); ++j) row[j] += a[i] * b[j];
  }
}

// out += M^T a
void add_transposed(const Tensor& m, std::span<const double> a, std::span<double> out) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const auto row = m.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[j] * a[i];
  }
}

}  // namespace

GruView gru_view(const ParamSet& p) {
  return {val(p, param::kGruWz), val(p, param::kGruWr), val(p, param::kGruWh),
          val(p, param::kGruUz), val(p, param::kGruUr), val(p, param::kGruUh),
          val(p, param::kGruBz), val(p, param::kGruBr), val(p, param::kGruBh)};
}

GruGrads gru_grads(ParamSet& p) {
  return {grd(p, param::kGruWz), grd(p, param::kGruWr), grd(p, param::kGruWh),
          grd(p, param::kGruUz), grd(p, param::kGruUr), grd(p, param::kGruUh),
          grd(p, param::kGruBz), grd(p, param::kGruBr), grd(p, param::kGruBh)};
}

ProjectorView projector_view(const ParamSet& p) { return {val(p, param::kImgWeight), val(p, param::kImgBias)}; }

ProjectorGrads projector_grads(ParamSet& p) { return {grd(p, param::kImgWeight), grd(p, param::kImgBias)}; }

void add_gru_params(ParamSet& params, std::size_t d, std::size_t m, std::mt19937_64& rng) {
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(d));
  const double rec_bound = 1.0 / std::sqrt(static_cast<double>(m));
  for (auto name : {param::kGruWz, param::kGruWr, param::kGruWh})
    params.add(std::string(name), uniform({m, d}, in_bound, rng));
  for (auto name : {param::kGruUz, param::kGruUr, param::kGruUh})
    params.add(std::string(name), uniform({m, m}, rec_bound, rng));
  for (auto name : {param::kGruBz, param::kGruBr, param::kGruBh})
    params.add(std::string(name), uniform({m}, rec_bound, rng));
}

void add_projector_params(ParamSet& params, std::size_t feature_dim, std::size_t m, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  params.add(std::string(param::kImgWeight), uniform({m, feature_dim}, bound, rng));
  params.add(std::string(param::kImgBias), uniform({m}, bound, rng));
}

std::vector<double> gru_forward(const GruView& gru, const Tensor& table, std::span<const TokenId> tokens,
                                GruTrace* trace) {
  const std::size_t m = gru.hidden_dim();
  if (table.cols() != gru.input_dim()) {
    throw DimensionError("gru: embedding width " + std::to_string(table.cols()) + " does not match input dim " +
                         std::to_string(gru.input_dim()));
  }
  std::vector<double> h(m, 0.0), z, r, cand, rh(m);
  if (trace) trace->steps.clear();
  for (TokenId tok : tokens) {
    if (tok == Vocabulary::kPad) continue;
    if (tok >= table.rows()) throw ContractError("token index " + std::to_string(tok) + " outside embedding table");
    const auto x = table.row(tok);
    affine2(gru.w_z, x, gru.u_z, h, gru.b_z, z);
    affine2(gru.w_r, x, gru.u_r, h, gru.b_r, r);
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = sigmoid(z[i]);
      r[i] = sigmoid(r[i]);
      rh[i] = r[i] * h[i];
    }
    affine2(gru.w_h, x, gru.u_h, rh, gru.b_h, cand);
    for (double& c : cand) c = std::tanh(c);
    if (trace) trace->steps.push_back({tok, h, z, r, cand});
    for (std::size_t i = 0; i < m; ++i) h[i] = (1.0 - z[i]) * h[i] + z[i] * cand[i];
  }
  if (trace) trace->h = h;
  return h;
}

void gru_backward(const GruView& gru, const Tensor& table, const GruTrace& trace, std::span<const double> d_h,
                  GruGrads* grads, Tensor* table_grad) {
  const std::size_t m = gru.hidden_dim();
  const std::size_t d = gru.input_dim();
  std::vector<double> dh(d_h.begin(), d_h.end());
  std::vector<double> dh_prev(m), da_z(m), da_r(m), da_h(m), d_rh(m), dr(m), rh(m), dx(d);
  for (std::size_t s = trace.steps.size(); s-- > 0;) {
    const auto& st = trace.steps[s];
    const auto x = table.row(st.token);
    for (std::size_t i = 0; i < m; ++i) {
      const double dc = dh[i] * st.z[i];
      const double dz = dh[i] * (st.candidate[i] - st.h_prev[i]);
      dh_prev[i] = dh[i] * (1.0 - st.z[i]);
      da_h[i] = dc * (1.0 - st.candidate[i] * st.candidate[i]);
      da_z[i] = dz * st.z[i] * (1.0 - st.z[i]);
      rh[i] = st.r[i] * st.h_prev[i];
    }
    std::fill(d_rh.begin(), d_rh.end(), 0.0);
    add_transposed(gru.u_h, da_h, d_rh);
    for (std::size_t i = 0; i < m; ++i) {
      dr[i] = d_rh[i] * st.h_prev[i];
      dh_prev[i] += d_rh[i] * st.r[i];
      da_r[i] = dr[i] * st.r[i] * (1.0 - st.r[i]);
    }
    add_transposed(gru.u_z, da_z, dh_prev);
    add_transposed(gru.u_r, da_r, dh_prev);

    if (grads) {
      add_outer(grads->w_z, da_z, x);
      add_outer(grads->w_r, da_r, x);
      add_outer(grads->w_h, da_h, x);
      add_outer(grads->u_z, da_z, st.h_prev);
      add_outer(grads->u_r, da_r, st.h_prev);
      add_outer(grads->u_h, da_h, rh);
      for (std::size_t i = 0; i < m; ++i) {
        grads->b_z[i] += da_z[i];
        grads->b_r[i] += da_r[i];
        grads->b_h[i] += da_h[i];
      }
    }
    if (table_grad) {
      std::fill(dx.begin(), dx.end(), 0.0);
      add_transposed(gru.w_z, da_z, dx);
      add_transposed(gru.w_r, da_r, dx);
      add_transposed(gru.w_h, da_h, dx);
      auto row = table_grad->row(st.token);
      for (std::size_t j = 0; j < d; ++j) row[j] += dx[j];
    }
    dh.swap(dh_prev);
  }
}

JointVector to_joint(std::span<const double> pre, Mode mode) {
  JointVector out{Tensor({pre.size()}), mode};
  auto v = out.values.values();
  for (std::size_t i = 0; i < pre.size(); ++i) v[i] = mode == Mode::Asymmetric ? std::abs(pre[i]) : pre[i];
  try {
    l2_normalize_inplace(v);
  } catch (const DegenerateInputError&) {
    throw DegenerateInputError("degenerate embedding: encoder output has zero norm");
  }
  return out;
}

std::vector<double> to_joint_backward(std::span<const double> pre, const JointVector& out,
                                      std::span<const double> d_out) {
  const auto y = out.values.values();
  double n = 0.0;
  for (double p : pre) n += p * p;
  n = std::sqrt(n);
  double proj = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) proj += y[i] * d_out[i];
  std::vector<double> d_pre(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const double dv = (d_out[i] - y[i] * proj) / n;
    if (out.mode == Mode::Asymmetric) {
      d_pre[i] = pre[i] > 0.0 ? dv : (pre[i] < 0.0 ? -dv : 0.0);
    } else {
      d_pre[i] = dv;
    }
  }
  return d_pre;
}

JointVector encode_caption(std::span<const TokenId> tokens, const Tensor& table, const GruView& gru, Mode mode) {
  bool any = false;
  for (TokenId t : tokens) any = any || t != Vocabulary::kPad;
  if (!any) throw DegenerateInputError("encode_caption: empty token sequence");
  const auto h = gru_forward(gru, table, tokens);
  return to_joint(h, mode);
}

std::vector<double> project_image(std::span<const double> feature, const ProjectorView& proj) {
  if (feature.size() != proj.weight.cols()) {
    throw DimensionError("encode_image: feature dimension " + std::to_string(feature.size()) +
                         " does not match projector input " + std::to_string(proj.weight.cols()));
  }
  std::vector<double> out(proj.weight.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = proj.bias[i];
    const auto row = proj.weight.row(i);
    for (std::size_t j = 0; j < feature.size(); ++j) acc += row[j] * feature[j];
    out[i] = acc;
  }
  return out;
}

JointVector encode_image(std::span<const double> feature, const ProjectorView& proj, Mode mode) {
  return to_joint(project_image(feature, proj), mode);
}

void project_image_backward(std::span<const double> feature, std::span<const double> d_pre, ProjectorGrads& grads) {
  add_outer(grads.weight, d_pre, feature);
  for (std::size_t i = 0; i < d_pre.size(); ++i) grads.bias[i] += d_pre[i];
}

}  // namespace ame
