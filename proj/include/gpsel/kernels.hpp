#pragma once

#include <memory>
#include <string>
#include <vector>

namespace gpsel {

// Base kernels. SE/LIN/MAT32/PER/RQ are the unscaled atoms of the search
// grammar; K1..K4 are the Mauna Loa preset components (each carries its own
// explicit scale, and K4 additionally carries the model noise term).
enum class Base { SE, LIN, MAT32, PER, RQ, K1, K2, K3, K4 };

struct KernelExpr;
using ExprPtr = std::shared_ptr<const KernelExpr>;

// Binary AST: leaves are base kernels, inner nodes combine children by + or *.
struct KernelExpr {
  enum class Kind { Leaf, Sum, Product };
  Kind kind = Kind::Leaf;
  Base base = Base::SE;  // valid for leaves only
  ExprPtr left, right;   // valid for Sum/Product
};

ExprPtr leaf(Base b);
ExprPtr sum(ExprPtr l, ExprPtr r);
ExprPtr product(ExprPtr l, ExprPtr r);

const char* base_name(Base b);
int base_param_count(Base b);

// Number of leaves; depth-limited searches count leaves, not tree height.
int expr_size(const ExprPtr& e);

// Infix rendering; '*' binds tighter than '+', parens only where needed.
std::string render(const ExprPtr& e);

// Canonical form: flatten nested sums/products and sort operands by rendered
// form, so that structural equality modulo commutativity becomes string
// equality. Used by recognition checking.
std::string canonical_render(const ExprPtr& e);

// Grammar: expr := term (('+'|'*') term)* ; term := base | '(' expr ')' ;
// base in {SE, LIN, MAT32, PER, RQ, K1, K2, K3, K4}; '*' binds tighter.
// Throws ParseError with byte offset on syntax errors / unknown names.
ExprPtr parse_kernel(const std::string& text);

// Mauna Loa presets: level 1..4 -> k1, k1+k2, k1+k2+k3, k1+k2+k3+k4.
ExprPtr mauna_kernel(int level);

// One raw hyperparameter slot: which leaf it belongs to (depth-first index,
// -1 for the trailing model noise) and its role name.
struct ParamInfo {
  int leaf_index;
  Base base;  // base of the owning leaf; trailing noise repeats Base::SE (unused)
  std::string role;
};

// Deterministic left-to-right depth-first parameter layout. Unless some leaf
// provides its own noise term (K4), a trailing "noise" entry is appended, so
// u = kernel hyperparameters + 1.
struct Layout {
  std::vector<ParamInfo> entries;
  bool provides_noise = false;  // true iff a K4 leaf supplies the noise term
  int u() const { return static_cast<int>(entries.size()); }
  // Number of raw values consumed by the kernel itself (excludes the trailing
  // noise entry when present).
  int kernel_params() const { return u() - (provides_noise ? 0 : 1); }
};

Layout param_layout(const ExprPtr& e);

// k(x, x2) for raw kernel parameters laid out per param_layout (kernel part
// only; the trailing noise raw value is handled by the model). Positive
// parameters are softplus(raw)-constrained.
double eval_kernel(const ExprPtr& e, const double* kernel_raw, double x, double x2);

// Same, also accumulating dk/d(raw_i) into grad[0..kernel_params) (overwrites).
double eval_kernel_grad(const ExprPtr& e, const double* kernel_raw, double x,
                        double x2, double* grad);

}  // namespace gpsel
