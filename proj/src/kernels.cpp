#include "gpsel/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "gpsel/errors.hpp"
#include "gpsel/numerics.hpp"

namespace gpsel {

ExprPtr leaf(Base b) {
  auto e = std::make_shared<KernelExpr>();
  e->kind = KernelExpr::Kind::Leaf;
  e->base = b;
  return e;
}

ExprPtr sum(ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<KernelExpr>();
  e->kind = KernelExpr::Kind::Sum;
  e->left = std::move(l);
  e->right = std::move(r);
  return e;
}

ExprPtr product(ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<KernelExpr>();
  e->kind = KernelExpr::Kind::Product;
  e->left = std::move(l);
  e->right = std::move(r);
  return e;
}

const char* base_name(Base b) {
  switch (b) {
    case Base::SE: return "SE";
    case Base::LIN: return "LIN";
    case Base::MAT32: return "MAT32";
    case Base::PER: return "PER";
    case Base::RQ: return "RQ";
    case Base::K1: return "K1";
    case Base::K2: return "K2";
    case Base::K3: return "K3";
    case Base::K4: return "K4";
  }
  return "?";
}

int base_param_count(Base b) {
  switch (b) {
    case Base::SE:
    case Base::LIN:
    case Base::MAT32: return 1;
    case Base::PER:
    case Base::RQ:
    case Base::K1: return 2;
    case Base::K2:
    case Base::K3:
    case Base::K4: return 3;
  }
  return 0;
}

int expr_size(const ExprPtr& e) {
  if (e->kind == KernelExpr::Kind::Leaf) return 1;
  return expr_size(e->left) + expr_size(e->right);
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

void render_rec(const ExprPtr& e, std::string& out) {
  switch (e->kind) {
    case KernelExpr::Kind::Leaf:
      out += base_name(e->base);
      break;
    case KernelExpr::Kind::Sum:
      render_rec(e->left, out);
      out += '+';
      render_rec(e->right, out);
      break;
    case KernelExpr::Kind::Product:
      for (const ExprPtr* c : {&e->left, &e->right}) {
        if (c == &e->right) out += '*';
        if ((*c)->kind == KernelExpr::Kind::Sum) {
          out += '(';
          render_rec(*c, out);
          out += ')';
        } else {
          render_rec(*c, out);
        }
      }
      break;
  }
}

void flatten(const ExprPtr& e, KernelExpr::Kind kind, std::vector<ExprPtr>& out) {
  if (e->kind == kind) {
    flatten(e->left, kind, out);
    flatten(e->right, kind, out);
  } else {
    out.push_back(e);
  }
}

std::string canonical_rec(const ExprPtr& e) {
  if (e->kind == KernelExpr::Kind::Leaf) return base_name(e->base);
  std::vector<ExprPtr> ops;
  flatten(e, e->kind, ops);
  std::vector<std::string> parts;
  parts.reserve(ops.size());
  for (const auto& op : ops) {
    std::string s = canonical_rec(op);
    // inside a product, sums need parens to stay unambiguous
    if (e->kind == KernelExpr::Kind::Product &&
        op->kind == KernelExpr::Kind::Sum) {
      s = "(" + s + ")";
    }
    parts.push_back(std::move(s));
  }
  std::sort(parts.begin(), parts.end());
  std::string joiner = e->kind == KernelExpr::Kind::Sum ? "+" : "*";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += joiner + parts[i];
  return out;
}

}  // namespace

std::string render(const ExprPtr& e) {
  std::string out;
  render_rec(e, out);
  return out;
}

std::string canonical_render(const ExprPtr& e) { return canonical_rec(e); }

// ---------------------------------------------------------------------------
// Parsing: recursive descent, '*' over '+', parens, byte-offset errors.

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw ParseError(msg, at);
  }

  ExprPtr parse_expr() {
    ExprPtr acc = parse_product();
    skip_ws();
    while (pos < text.size() && text[pos] == '+') {
      ++pos;
      acc = sum(acc, parse_product());
      skip_ws();
    }
    return acc;
  }

  ExprPtr parse_product() {
    ExprPtr acc = parse_term();
    skip_ws();
    while (pos < text.size() && text[pos] == '*') {
      ++pos;
      acc = product(acc, parse_term());
      skip_ws();
    }
    return acc;
  }

  ExprPtr parse_term() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input", pos);
    if (text[pos] == '(') {
      ++pos;
      ExprPtr inner = parse_expr();
      skip_ws();
      if (pos >= text.size() || text[pos] != ')') fail("expected ')'", pos);
      ++pos;
      return inner;
    }
    if (!std::isalnum(static_cast<unsigned char>(text[pos]))) {
      fail(std::string("unexpected character '") + text[pos] + "'", pos);
    }
    const std::size_t start = pos;
    while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::string name = text.substr(start, pos - start);
    if (name == "SE") return leaf(Base::SE);
    if (name == "LIN") return leaf(Base::LIN);
    if (name == "MAT32") return leaf(Base::MAT32);
    if (name == "PER") return leaf(Base::PER);
    if (name == "RQ") return leaf(Base::RQ);
    if (name == "K1") return leaf(Base::K1);
    if (name == "K2") return leaf(Base::K2);
    if (name == "K3") return leaf(Base::K3);
    if (name == "K4") return leaf(Base::K4);
    fail("unknown base kernel '" + name + "'", start);
  }
};

}  // namespace

ExprPtr parse_kernel(const std::string& text) {
  Parser p{text};
  ExprPtr e = p.parse_expr();
  p.skip_ws();
  if (p.pos < text.size()) p.fail("trailing input", p.pos);
  return e;
}

ExprPtr mauna_kernel(int level) {
  if (level < 1 || level > 4) {
    throw ConfigError("mauna kernel level must be in 1..4, got " + std::to_string(level));
  }
  ExprPtr e = leaf(Base::K1);
  if (level >= 2) e = sum(e, leaf(Base::K2));
  if (level >= 3) e = sum(e, leaf(Base::K3));
  if (level >= 4) e = sum(e, leaf(Base::K4));
  return e;
}

// ---------------------------------------------------------------------------
// Layout

namespace {

void layout_rec(const ExprPtr& e, int& leaf_index, Layout& out) {
  if (e->kind != KernelExpr::Kind::Leaf) {
    layout_rec(e->left, leaf_index, out);
    layout_rec(e->right, leaf_index, out);
    return;
  }
  const int li = leaf_index++;
  auto add = [&](const char* role) { out.entries.push_back({li, e->base, role}); };
  switch (e->base) {
    case Base::SE:
    case Base::MAT32: add("lengthscale"); break;
    case Base::LIN: add("variance"); break;
    case Base::PER: add("lengthscale"); add("period"); break;
    case Base::RQ: add("lengthscale"); add("alpha"); break;
    case Base::K1: add("scale"); add("lengthscale"); break;
    case Base::K2: add("scale"); add("lengthscale"); add("period"); break;
    case Base::K3: add("scale"); add("lengthscale"); add("alpha"); break;
    case Base::K4:
      add("scale"); add("lengthscale"); add("noise");
      out.provides_noise = true;
      break;
  }
}

}  // namespace

Layout param_layout(const ExprPtr& e) {
  Layout out;
  int leaf_index = 0;
  layout_rec(e, leaf_index, out);
  if (!out.provides_noise) {
    out.entries.push_back({-1, Base::SE, "noise"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation. Raw parameters are consumed depth-first; every parameter is
// positivity-constrained via softplus. Gradients are w.r.t. the raw values
// (chain rule through sigmoid).

namespace {

double eval_rec(const KernelExpr* e, const double* p, int& off, double x, double x2) {
  if (e->kind == KernelExpr::Kind::Sum) {
    const double l = eval_rec(e->left.get(), p, off, x, x2);
    const double r = eval_rec(e->right.get(), p, off, x, x2);
    return l + r;
  }
  if (e->kind == KernelExpr::Kind::Product) {
    const double l = eval_rec(e->left.get(), p, off, x, x2);
    const double r = eval_rec(e->right.get(), p, off, x, x2);
    return l * r;
  }
  const double tau = x - x2;
  const double d2 = tau * tau;
  switch (e->base) {
    case Base::SE: {
      const double ell = softplus(p[off++]);
      return std::exp(-d2 / (2.0 * ell * ell));
    }
    case Base::LIN: {
      const double v = softplus(p[off++]);
      return v * x * x2;
    }
    case Base::MAT32: {
      const double ell = softplus(p[off++]);
      const double a = std::sqrt(3.0) * std::abs(tau) / ell;
      return (1.0 + a) * std::exp(-a);
    }
    case Base::PER: {
      const double ell = softplus(p[off]);
      const double per = softplus(p[off + 1]);
      off += 2;
      const double s = std::sin(M_PI * tau / per);
      return std::exp(-2.0 * s * s / (ell * ell));
    }
    case Base::RQ: {
      const double ell = softplus(p[off]);
      const double alpha = softplus(p[off + 1]);
      off += 2;
      const double b = 1.0 + d2 / (2.0 * alpha * ell * ell);
      return std::pow(b, -alpha);
    }
    case Base::K1: {
      const double th1 = softplus(p[off]);
      const double th2 = softplus(p[off + 1]);
      off += 2;
      return th1 * th1 * std::exp(-d2 / (2.0 * th2 * th2));
    }
    case Base::K2: {
      const double th3 = softplus(p[off]);
      const double th4 = softplus(p[off + 1]);
      const double th5 = softplus(p[off + 2]);
      off += 3;
      const double s = std::sin(M_PI * tau);
      return th3 * th3 *
             std::exp(-d2 / (2.0 * th4 * th4) - 2.0 * s * s / (th5 * th5));
    }
    case Base::K3: {
      const double th6 = softplus(p[off]);
      const double th7 = softplus(p[off + 1]);
      const double th8 = softplus(p[off + 2]);
      off += 3;
      const double b = 1.0 + d2 / (2.0 * th8 * th7 * th7);
      return th6 * th6 * std::pow(b, -th8);
    }
    case Base::K4: {
      const double th9 = softplus(p[off]);
      const double th10 = softplus(p[off + 1]);
      const double th11 = softplus(p[off + 2]);
      off += 3;
      const double delta = x == x2 ? 1.0 : 0.0;
      return th9 * th9 * std::exp(-d2 / (2.0 * th10 * th10)) + th11 * th11 * delta;
    }
  }
  return 0.0;
}

double eval_grad_rec(const KernelExpr* e, const double* p, int& off, double x,
                     double x2, double* grad) {
  if (e->kind != KernelExpr::Kind::Leaf) {
    const int loff = off;
    const double lv = eval_grad_rec(e->left.get(), p, off, x, x2, grad);
    const int roff = off;
    const double rv = eval_grad_rec(e->right.get(), p, off, x, x2, grad);
    if (e->kind == KernelExpr::Kind::Sum) return lv + rv;
    // product rule: scale each child's gradient block by the other's value
    for (int i = loff; i < roff; ++i) grad[i] *= rv;
    for (int i = roff; i < off; ++i) grad[i] *= lv;
    return lv * rv;
  }
  const double tau = x - x2;
  const double d2 = tau * tau;
  switch (e->base) {
    case Base::SE: {
      const double raw = p[off];
      const double ell = softplus(raw);
      const double k = std::exp(-d2 / (2.0 * ell * ell));
      grad[off] = k * d2 / (ell * ell * ell) * sigmoid(raw);
      ++off;
      return k;
    }
    case Base::LIN: {
      const double raw = p[off];
      const double k = softplus(raw) * x * x2;
      grad[off] = x * x2 * sigmoid(raw);
      ++off;
      return k;
    }
    case Base::MAT32: {
      const double raw = p[off];
      const double ell = softplus(raw);
      const double a = std::sqrt(3.0) * std::abs(tau) / ell;
      const double ea = std::exp(-a);
      grad[off] = ea * a * a / ell * sigmoid(raw);
      ++off;
      return (1.0 + a) * ea;
    }
    case Base::PER: {
      const double rl = p[off], rp = p[off + 1];
      const double ell = softplus(rl), per = softplus(rp);
      const double s = std::sin(M_PI * tau / per);
      const double k = std::exp(-2.0 * s * s / (ell * ell));
      grad[off] = k * 4.0 * s * s / (ell * ell * ell) * sigmoid(rl);
      grad[off + 1] = k * (2.0 * M_PI * tau / (ell * ell * per * per)) *
                      std::sin(2.0 * M_PI * tau / per) * sigmoid(rp);
      off += 2;
      return k;
    }
    case Base::RQ: {
      const double rl = p[off], ra = p[off + 1];
      const double ell = softplus(rl), alpha = softplus(ra);
      const double b = 1.0 + d2 / (2.0 * alpha * ell * ell);
      const double k = std::pow(b, -alpha);
      grad[off] = std::pow(b, -alpha - 1.0) * d2 / (ell * ell * ell) * sigmoid(rl);
      grad[off + 1] =
          k * (-std::log(b) + d2 / (2.0 * alpha * ell * ell * b)) * sigmoid(ra);
      off += 2;
      return k;
    }
    case Base::K1: {
      const double rs = p[off], rl = p[off + 1];
      const double th1 = softplus(rs), th2 = softplus(rl);
      const double se = std::exp(-d2 / (2.0 * th2 * th2));
      grad[off] = 2.0 * th1 * se * sigmoid(rs);
      grad[off + 1] = th1 * th1 * se * d2 / (th2 * th2 * th2) * sigmoid(rl);
      off += 2;
      return th1 * th1 * se;
    }
    case Base::K2: {
      const double rs = p[off], rl = p[off + 1], rq = p[off + 2];
      const double th3 = softplus(rs), th4 = softplus(rl), th5 = softplus(rq);
      const double s = std::sin(M_PI * tau);
      const double env =
          std::exp(-d2 / (2.0 * th4 * th4) - 2.0 * s * s / (th5 * th5));
      const double k = th3 * th3 * env;
      grad[off] = 2.0 * th3 * env * sigmoid(rs);
      grad[off + 1] = k * d2 / (th4 * th4 * th4) * sigmoid(rl);
      grad[off + 2] = k * 4.0 * s * s / (th5 * th5 * th5) * sigmoid(rq);
      off += 3;
      return k;
    }
    case Base::K3: {
      const double rs = p[off], rl = p[off + 1], ra = p[off + 2];
      const double th6 = softplus(rs), th7 = softplus(rl), th8 = softplus(ra);
      const double b = 1.0 + d2 / (2.0 * th8 * th7 * th7);
      const double rq = std::pow(b, -th8);
      grad[off] = 2.0 * th6 * rq * sigmoid(rs);
      grad[off + 1] = th6 * th6 * std::pow(b, -th8 - 1.0) * d2 /
                      (th7 * th7 * th7) * sigmoid(rl);
      grad[off + 2] = th6 * th6 * rq *
                      (-std::log(b) + d2 / (2.0 * th8 * th7 * th7 * b)) *
                      sigmoid(ra);
      off += 3;
      return th6 * th6 * rq;
    }
    case Base::K4: {
      const double rs = p[off], rl = p[off + 1], rn = p[off + 2];
      const double th9 = softplus(rs), th10 = softplus(rl), th11 = softplus(rn);
      const double se = std::exp(-d2 / (2.0 * th10 * th10));
      const double delta = x == x2 ? 1.0 : 0.0;
      grad[off] = 2.0 * th9 * se * sigmoid(rs);
      grad[off + 1] = th9 * th9 * se * d2 / (th10 * th10 * th10) * sigmoid(rl);
      grad[off + 2] = 2.0 * th11 * delta * sigmoid(rn);
      off += 3;
      return th9 * th9 * se + th11 * th11 * delta;
    }
  }
  return 0.0;
}

}  // namespace

double eval_kernel(const ExprPtr& e, const double* kernel_raw, double x, double x2) {
  int off = 0;
  return eval_rec(e.get(), kernel_raw, off, x, x2);
}

double eval_kernel_grad(const ExprPtr& e, const double* kernel_raw, double x,
                        double x2, double* grad) {
  int off = 0;
  return eval_grad_rec(e.get(), kernel_raw, off, x, x2, grad);
}

}  // namespace gpsel
