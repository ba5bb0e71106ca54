#include "smate/finite_field.hpp"

#include <array>
#include <bit>
#include <string>
#include <utility>

#include "combinations.hpp"

namespace smate {
namespace {

int poly_degree(std::uint32_t p) { return p == 0 ? -1 : std::bit_width(p) - 1; }

std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b) {
  const int db = poly_degree(b);
  for (int da = poly_degree(a); da >= db; da = poly_degree(a)) {
    a ^= b << (da - db);
  }
  return a;
}

bool is_irreducible(std::uint32_t p, unsigned degree) {
  for (std::uint32_t d = 2; poly_degree(d) <= static_cast<int>(degree) / 2; ++d) {
    if (poly_mod(p, d) == 0) return false;
  }
  return true;
}

// Shift-and-reduce product used only while building the tables.
std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b, std::uint32_t poly,
                       unsigned degree) {
  std::uint32_t r = 0;
  while (b != 0) {
    if (b & 1U) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (1U << degree)) a ^= poly;
  }
  return r;
}

constexpr std::array<std::uint32_t, 17> kPrimitivePolynomials = {
    0,     0x3,   0x7,   0xB,    0x13,   0x25,   0x43,   0x89,    0x11B,
    0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};

}  // namespace

std::uint32_t FieldContext::default_polynomial(unsigned degree) {
  if (degree < 1 || degree > 16) {
    throw FieldError("field degree must be in [1, 16], got " +
                     std::to_string(degree));
  }
  return kPrimitivePolynomials[degree];
}

std::uint32_t FieldContext::default_generator(unsigned degree) {
  if (degree == 8) return kDefaultGenerator;
  return degree == 1 ? 0x1 : 0x2;
}

FieldContext::FieldContext(unsigned degree, std::uint32_t polynomial,
                           std::uint32_t generator)
    : degree_(degree), polynomial_(polynomial), generator_(generator) {
  if (degree < 1 || degree > 16) {
    throw FieldError("field degree must be in [1, 16], got " +
                     std::to_string(degree));
  }
  order_ = 1U << degree;
  if (poly_degree(polynomial) != static_cast<int>(degree)) {
    throw FieldError("reduction polynomial must have degree " +
                     std::to_string(degree));
  }
  if (!is_irreducible(polynomial, degree)) {
    throw FieldError("reduction polynomial is reducible");
  }
  if (generator == 0 || generator >= order_) {
    throw FieldError("generator must be a nonzero field element");
  }

  const std::uint32_t group = order_ - 1;
  exp_.resize(2 * group);
  log_.assign(order_, 0);
  std::vector<bool> seen(order_, false);
  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i < group; ++i) {
    if (seen[x]) {
      throw FieldError("generator does not have multiplicative order q-1");
    }
    seen[x] = true;
    exp_[i] = exp_[i + group] = static_cast<std::uint16_t>(x);
    log_[x] = static_cast<std::uint16_t>(i);
    x = slow_mul(x, generator, polynomial, degree);
  }
  if (x != 1) {
    throw FieldError("generator does not have multiplicative order q-1");
  }
  for (std::uint32_t v = 1; v < order_; ++v) {
    if (exp_[log_[v]] != v) throw FieldError("log/antilog tables inconsistent");
  }

  if (degree <= 8) {
    mul_table_.assign(static_cast<std::size_t>(order_) * order_, 0);
    for (std::uint32_t a = 1; a < order_; ++a) {
      for (std::uint32_t b = 1; b < order_; ++b) {
        mul_table_[a * order_ + b] = exp_[log_[a] + log_[b]];
      }
    }
  }
}

std::shared_ptr<const FieldContext> FieldContext::gf256() {
  static const auto instance = std::make_shared<const FieldContext>();
  return instance;
}

FieldElement FieldContext::element(std::uint32_t v) const {
  if (v >= order_) {
    throw FieldError("value " + std::to_string(v) + " outside GF(2^" +
                     std::to_string(degree_) + ")");
  }
  return FieldElement(static_cast<std::uint16_t>(v));
}

FieldElement FieldContext::mul(FieldElement a, FieldElement b) const {
  if (a.value == 0 || b.value == 0) return FieldElement();
  if (!mul_table_.empty()) {
    return FieldElement(mul_table_[a.value * order_ + b.value]);
  }
  return FieldElement(exp_[log_[a.value] + log_[b.value]]);
}

FieldElement FieldContext::inv(FieldElement a) const {
  if (a.value == 0) throw FieldError("zero has no multiplicative inverse");
  const std::uint32_t group = order_ - 1;
  return FieldElement(exp_[(group - log_[a.value]) % group]);
}

FieldElement FieldContext::div(FieldElement a, FieldElement b) const {
  return mul(a, inv(b));
}

FieldElement FieldContext::pow(FieldElement a, std::int64_t e) const {
  if (a.value == 0) {
    if (e < 0) throw FieldError("zero raised to a negative power");
    return FieldElement(e == 0 ? 1 : 0);
  }
  const auto group = static_cast<std::int64_t>(order_ - 1);
  std::int64_t r = (static_cast<std::int64_t>(log_[a.value]) * (e % group)) % group;
  if (r < 0) r += group;
  return FieldElement(exp_[static_cast<std::size_t>(r)]);
}

FieldElement FieldContext::alpha_pow(std::int64_t e) const {
  return pow(generator(), e);
}

std::uint32_t FieldContext::log(FieldElement a) const {
  if (a.value == 0) throw FieldError("log of zero");
  return log_[a.value];
}

std::size_t FieldContext::symbol_unit() const {
  switch (degree_) {
    case 1:
    case 2:
    case 4:
    case 8:
      return 1;
    case 16:
      return 2;
    default:
      return 0;
  }
}

void FieldContext::multiply_accumulate(FieldElement coeff,
                                       std::span<const std::uint8_t> src,
                                       std::span<std::uint8_t> dst) const {
  if (src.size() != dst.size()) {
    throw FieldError("multiply_accumulate: region sizes differ");
  }
  const std::size_t unit = symbol_unit();
  if (unit == 0) {
    throw FieldError("byte symbols are not supported over GF(2^" +
                     std::to_string(degree_) + ")");
  }
  if (src.size() % unit != 0) {
    throw FieldError("region length is not a multiple of the symbol unit");
  }
  if (coeff.value == 0) return;
  if (coeff.value == 1) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] ^= src[i];
    return;
  }

  if (degree_ == 8) {
    const std::uint16_t* row = &mul_table_[coeff.value * order_];
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] ^= static_cast<std::uint8_t>(row[src[i]]);
    }
    return;
  }
  if (degree_ == 16) {
    for (std::size_t i = 0; i < src.size(); i += 2) {
      const auto v = static_cast<std::uint16_t>((src[i] << 8) | src[i + 1]);
      const std::uint16_t p = mul(coeff, FieldElement(v)).value;
      dst[i] ^= static_cast<std::uint8_t>(p >> 8);
      dst[i + 1] ^= static_cast<std::uint8_t>(p & 0xFF);
    }
    return;
  }

  // m in {2, 4}: every byte packs 8/m independent lanes.
  std::array<std::uint8_t, 256> lut{};
  const std::uint32_t mask = order_ - 1;
  for (std::uint32_t b = 0; b < 256; ++b) {
    std::uint32_t out = 0;
    for (unsigned shift = 0; shift < 8; shift += degree_) {
      const auto lane = static_cast<std::uint16_t>((b >> shift) & mask);
      out |= static_cast<std::uint32_t>(mul(coeff, FieldElement(lane)).value) << shift;
    }
    lut[b] = static_cast<std::uint8_t>(out);
  }
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] ^= lut[src[i]];
}

FieldMatrix FieldMatrix::identity(std::size_t n) {
  FieldMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = FieldElement(1);
  return m;
}

FieldElement& FieldMatrix::at(std::size_t r, std::size_t c) {
  if (r >= rows_ || c >= cols_) throw DimensionError("matrix index out of range");
  return data_[r * cols_ + c];
}

FieldElement FieldMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw DimensionError("matrix index out of range");
  return data_[r * cols_ + c];
}

FieldMatrix FieldMatrix::select(std::span<const std::size_t> rows,
                                std::span<const std::size_t> cols) const {
  FieldMatrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out.at(r, c) = at(rows[r], cols[c]);
    }
  }
  return out;
}

FieldMatrix FieldMatrix::select_columns(std::span<const std::size_t> cols) const {
  std::vector<std::size_t> all(rows_);
  for (std::size_t r = 0; r < rows_; ++r) all[r] = r;
  return select(all, cols);
}

CoefficientMatrix build_vandermonde(const FieldContext& field, std::size_t t,
                                    std::size_t n) {
  if (t < 1 || t > n) {
    throw DimensionError("vandermonde needs 1 <= t <= n (t=" + std::to_string(t) +
                         ", n=" + std::to_string(n) + ")");
  }
  if (n > field.order() - 1) {
    throw DimensionError("vandermonde needs n <= q-1 = " +
                         std::to_string(field.order() - 1) + " (n=" +
                         std::to_string(n) + ")");
  }
  CoefficientMatrix h(t, n);
  for (std::size_t l = 0; l < t; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      h.at(l, i) = field.alpha_pow(static_cast<std::int64_t>(i * l));
    }
  }
  return h;
}

namespace {

// Gauss-Jordan on a copy of `a` applied jointly to `rhs` (r x s).
// Returns false when `a` is singular.
bool eliminate(const FieldContext& field, FieldMatrix a, FieldMatrix& rhs) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a.at(pivot, col).value == 0) ++pivot;
    if (pivot == n) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a.at(pivot, c), a.at(col, c));
      for (std::size_t c = 0; c < rhs.cols(); ++c) {
        std::swap(rhs.at(pivot, c), rhs.at(col, c));
      }
    }
    const FieldElement scale = field.inv(a.at(col, col));
    for (std::size_t c = 0; c < n; ++c) a.at(col, c) = field.mul(a.at(col, c), scale);
    for (std::size_t c = 0; c < rhs.cols(); ++c) {
      rhs.at(col, c) = field.mul(rhs.at(col, c), scale);
    }
    for (std::size_t r = 0; r < n; ++r) {
      const FieldElement f = a.at(r, col);
      if (r == col || f.value == 0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a.at(r, c) = field.sub(a.at(r, c), field.mul(f, a.at(col, c)));
      }
      for (std::size_t c = 0; c < rhs.cols(); ++c) {
        rhs.at(r, c) = field.sub(rhs.at(r, c), field.mul(f, rhs.at(col, c)));
      }
    }
  }
  return true;
}

void require_square(const FieldMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("matrix is not square");
}

}  // namespace

std::vector<FieldElement> gauss_solve(const FieldContext& field,
                                      const FieldMatrix& a,
                                      std::span<const FieldElement> b) {
  require_square(a);
  if (b.size() != a.rows()) {
    throw DimensionError("right-hand side length does not match matrix");
  }
  FieldMatrix rhs(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) rhs.at(i, 0) = b[i];
  if (!eliminate(field, a, rhs)) throw SingularMatrixError("matrix is singular");
  std::vector<FieldElement> x(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) x[i] = rhs.at(i, 0);
  return x;
}

FieldMatrix invert(const FieldContext& field, const FieldMatrix& a) {
  require_square(a);
  FieldMatrix inv = FieldMatrix::identity(a.rows());
  if (!eliminate(field, a, inv)) throw SingularMatrixError("matrix is singular");
  return inv;
}

std::vector<FieldElement> multiply(const FieldContext& field,
                                   const FieldMatrix& a,
                                   std::span<const FieldElement> x) {
  if (x.size() != a.cols()) throw DimensionError("vector length does not match matrix");
  std::vector<FieldElement> y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      y[r] = field.add(y[r], field.mul(a.at(r, c), x[c]));
    }
  }
  return y;
}

bool is_invertible(const FieldContext& field, const FieldMatrix& a) {
  require_square(a);
  FieldMatrix none(a.rows(), 0);
  return eliminate(field, a, none);
}

std::optional<std::vector<std::size_t>> find_singular_minor(
    const FieldContext& field, const CoefficientMatrix& h) {
  std::optional<std::vector<std::size_t>> bad;
  detail::for_each_combination(h.cols(), h.rows(), [&](const auto& cols) {
    if (is_invertible(field, h.select_columns(cols))) return true;
    bad = cols;
    return false;
  });
  return bad;
}

}  // namespace smate
