#include "entlab/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "entlab/error.hpp"

namespace entlab {

struct System::Impl {
  Kind kind = Kind::Identity;
  std::size_t iter = 1;  // base steps per application (non-shift kinds)

  std::size_t alphabet = 2;
  std::size_t stride = 1;

  std::vector<System> factors;
  std::vector<std::size_t> factor_dims;

  std::vector<double> matrix;
  std::vector<long long> imatrix;
  std::vector<State> points;
  std::vector<std::uint32_t> image;
  std::size_t dim = 1;
  LinearMetric lmetric = LinearMetric::Arctan;
  double window_halfwidth = 1.0;
};

System::System(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

System System::identity(std::size_t dim) {
  auto p = std::make_shared<Impl>();
  p->kind = Kind::Identity;
  p->dim = dim;
  return System(p);
}

System System::full_shift(std::size_t alphabet, std::size_t stride) {
  if (alphabet < 2) throw ValidationError("full_shift: alphabet must have at least 2 symbols");
  if (stride == 0) throw ValidationError("full_shift: stride must be positive");
  auto p = std::make_shared<Impl>();
  p->kind = Kind::FullShift;
  p->alphabet = alphabet;
  p->stride = stride;
  return System(p);
}

System System::real_shift(std::size_t stride) {
  if (stride == 0) throw ValidationError("real_shift: stride must be positive");
  auto p = std::make_shared<Impl>();
  p->kind = Kind::RealShift;
  p->stride = stride;
  return System(p);
}

System System::formal_derivative() {
  auto p = std::make_shared<Impl>();
  p->kind = Kind::FormalDerivative;
  return System(p);
}

System System::product(std::vector<System> factors, std::vector<std::size_t> factor_dims) {
  if (factors.empty()) throw ValidationError("product: needs at least one factor");
  if (factors.size() != factor_dims.size())
    throw ValidationError("product: factor/dim count mismatch");
  for (std::size_t d : factor_dims)
    if (d == 0) throw ValidationError("product: factor dimension must be positive");
  auto p = std::make_shared<Impl>();
  p->kind = Kind::Product;
  p->factors = std::move(factors);
  p->factor_dims = std::move(factor_dims);
  return System(p);
}

System System::linear(std::vector<double> matrix_row_major, std::size_t dim,
                      LinearMetric metric_choice, double window_halfwidth) {
  if (matrix_row_major.size() != dim * dim)
    throw DimensionError("linear: matrix size does not match dimension");
  auto p = std::make_shared<Impl>();
  p->kind = Kind::Linear;
  p->matrix = std::move(matrix_row_major);
  p->dim = dim;
  p->lmetric = metric_choice;
  p->window_halfwidth = window_halfwidth;
  return System(p);
}

System System::torus(std::vector<long long> matrix_row_major, std::size_t dim) {
  if (matrix_row_major.size() != dim * dim)
    throw DimensionError("torus: matrix size does not match dimension");
  auto p = std::make_shared<Impl>();
  p->kind = Kind::Torus;
  p->imatrix = std::move(matrix_row_major);
  p->dim = dim;
  return System(p);
}

System System::tabulated(std::vector<State> points, std::vector<std::uint32_t> image) {
  if (points.empty()) throw ValidationError("tabulated: empty point list");
  if (points.size() != image.size())
    throw ValidationError("tabulated: point/image count mismatch");
  for (auto v : image)
    if (v >= points.size()) throw ValidationError("tabulated: image index out of range");
  auto p = std::make_shared<Impl>();
  p->kind = Kind::Tabulated;
  p->points = std::move(points);
  p->image = std::move(image);
  p->dim = p->points[0].size();
  return System(p);
}

System System::iterate(std::size_t k) const {
  if (k == 0) throw RangeError("iterate: k must be >= 1");
  if (k == 1) return *this;
  auto p = std::make_shared<Impl>(*impl_);
  switch (impl_->kind) {
    case Kind::FullShift:
    case Kind::RealShift:
      p->stride = impl_->stride * k;
      break;
    case Kind::Product: {
      std::vector<System> iterated;
      iterated.reserve(impl_->factors.size());
      for (const auto& f : impl_->factors) iterated.push_back(f.iterate(k));
      p->factors = std::move(iterated);
      break;
    }
    default:
      p->iter = impl_->iter * k;
      break;
  }
  return System(p);
}

namespace {

void shift_left(StateView x, std::size_t s, State& out) {
  const std::size_t L = x.size();
  out.assign(L, 0.0);
  for (std::size_t j = 0; j + s < L; ++j) out[j] = x[j + s];
}

State formal_derivative_step(StateView x) {
  const std::size_t L = x.size();
  State out(L, 0.0);
  for (std::size_t j = 0; j + 1 < L; ++j) out[j] = double(j + 1) * x[j + 1];
  return out;
}

double wrap_unit(double v) {
  v -= std::floor(v);
  if (v >= 1.0) v = 0.0;  // guard against -1e-18 flooring to 1.0
  return v;
}

}  // namespace

State System::step(StateView x) const {
  const Impl& im = *impl_;
  State cur;
  switch (im.kind) {
    case Kind::Identity:
      return to_state(x);
    case Kind::FullShift:
    case Kind::RealShift: {
      shift_left(x, im.stride, cur);
      return cur;
    }
    case Kind::FormalDerivative: {
      cur = to_state(x);
      for (std::size_t i = 0; i < im.iter; ++i) cur = formal_derivative_step(cur);
      return cur;
    }
    case Kind::Product: {
      std::size_t total = 0;
      for (std::size_t d : im.factor_dims) total += d;
      if (x.size() != total) throw DimensionError("product step: state length mismatch");
      cur.reserve(total);
      std::size_t off = 0;
      for (std::size_t f = 0; f < im.factors.size(); ++f) {
        State piece = im.factors[f].step(x.subspan(off, im.factor_dims[f]));
        cur.insert(cur.end(), piece.begin(), piece.end());
        off += im.factor_dims[f];
      }
      return cur;
    }
    case Kind::Linear: {
      if (x.size() != im.dim) throw DimensionError("linear step: state length mismatch");
      cur = to_state(x);
      State nxt(im.dim, 0.0);
      for (std::size_t it = 0; it < im.iter; ++it) {
        for (std::size_t r = 0; r < im.dim; ++r) {
          double s = 0.0;
          for (std::size_t c = 0; c < im.dim; ++c) s += im.matrix[r * im.dim + c] * cur[c];
          nxt[r] = s;
        }
        std::swap(cur, nxt);
      }
      return cur;
    }
    case Kind::Tabulated: {
      std::size_t idx = im.points.size();
      for (std::size_t i = 0; i < im.points.size(); ++i) {
        const State& p = im.points[i];
        if (p.size() == x.size() && std::equal(p.begin(), p.end(), x.begin())) {
          idx = i;
          break;
        }
      }
      if (idx == im.points.size())
        throw ValidationError("tabulated step: state is not a listed point");
      for (std::size_t it = 0; it < im.iter; ++it) idx = im.image[idx];
      return im.points[idx];
    }
    case Kind::Torus: {
      if (x.size() != im.dim) throw DimensionError("torus step: state length mismatch");
      cur = to_state(x);
      State nxt(im.dim, 0.0);
      for (std::size_t it = 0; it < im.iter; ++it) {
        for (std::size_t r = 0; r < im.dim; ++r) {
          double s = 0.0;
          for (std::size_t c = 0; c < im.dim; ++c)
            s += double(im.imatrix[r * im.dim + c]) * cur[c];
          nxt[r] = wrap_unit(s);
        }
        std::swap(cur, nxt);
      }
      return cur;
    }
  }
  throw UsageError("step: unknown system kind");
}

State System::orbit_point(StateView x, std::size_t j) const {
  State cur = to_state(x);
  while (j--) cur = step(cur);
  return cur;
}

System::Kind System::kind() const { return impl_->kind; }
std::size_t System::iterate_count() const { return impl_->iter; }

std::size_t System::measurability_bound(std::size_t n) const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case Kind::FullShift:
    case Kind::RealShift:
      return n + im.stride;
    case Kind::FormalDerivative:
      return n + im.iter;
    case Kind::Identity:
    case Kind::Product:
    case Kind::Linear:
    case Kind::Torus:
    case Kind::Tabulated:
      return n;  // coordinate-wise (factor index for Product, block for the rest)
  }
  return n;
}

Metric System::canonical_metric() const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case Kind::FullShift:
      return metrics::sequence(SequenceCoord::Discrete);
    case Kind::RealShift:
      return metrics::sequence(SequenceCoord::CappedAbs);
    case Kind::FormalDerivative:
      return metrics::sequence(SequenceCoord::Arctan);
    case Kind::Product: {
      std::vector<Metric> ms;
      ms.reserve(im.factors.size());
      for (const auto& f : im.factors) ms.push_back(f.canonical_metric());
      return metrics::factor_product(std::move(ms), im.factor_dims);
    }
    case Kind::Linear:
      if (im.lmetric == LinearMetric::Window) return metrics::window(1.0);
      return im.dim == 1 ? metrics::arctan_line()
                         : metrics::sequence(SequenceCoord::Arctan);
    case Kind::Torus:
      return metrics::torus_sup();
    case Kind::Identity:
    case Kind::Tabulated:
      return metrics::euclidean_capped(1.0);
  }
  return metrics::euclidean_capped(1.0);
}

std::size_t System::alphabet() const {
  if (impl_->kind != Kind::FullShift) throw UsageError("alphabet: not a full shift");
  return impl_->alphabet;
}
std::size_t System::stride() const {
  if (impl_->kind != Kind::FullShift && impl_->kind != Kind::RealShift)
    throw UsageError("stride: not a shift");
  return impl_->stride;
}
const std::vector<System>& System::factors() const {
  if (impl_->kind != Kind::Product) throw UsageError("factors: not a product");
  return impl_->factors;
}
const std::vector<std::size_t>& System::factor_dims() const {
  if (impl_->kind != Kind::Product) throw UsageError("factor_dims: not a product");
  return impl_->factor_dims;
}
const std::vector<double>& System::matrix() const {
  if (impl_->kind != Kind::Linear) throw UsageError("matrix: not a linear map");
  return impl_->matrix;
}
const std::vector<long long>& System::torus_matrix() const {
  if (impl_->kind != Kind::Torus) throw UsageError("torus_matrix: not a torus map");
  return impl_->imatrix;
}
std::size_t System::dim() const {
  switch (impl_->kind) {
    case Kind::Identity:
    case Kind::Linear:
    case Kind::Torus:
    case Kind::Tabulated:
      return impl_->dim;
    default:
      throw UsageError("dim: system has no fixed finite dimension");
  }
}
LinearMetric System::linear_metric_choice() const {
  if (impl_->kind != Kind::Linear) throw UsageError("linear_metric_choice: not a linear map");
  return impl_->lmetric;
}
double System::window_halfwidth() const {
  if (impl_->kind != Kind::Linear) throw UsageError("window_halfwidth: not a linear map");
  return impl_->window_halfwidth;
}

namespace {

std::string matrix_text(const std::vector<long long>& m, std::size_t d) {
  std::ostringstream os;
  for (std::size_t r = 0; r < d; ++r) {
    if (r) os << ';';
    for (std::size_t c = 0; c < d; ++c) {
      if (c) os << ',';
      os << m[r * d + c];
    }
  }
  return os.str();
}

std::string matrix_text(const std::vector<double>& m, std::size_t d) {
  std::ostringstream os;
  for (std::size_t r = 0; r < d; ++r) {
    if (r) os << ';';
    for (std::size_t c = 0; c < d; ++c) {
      if (c) os << ',';
      os << m[r * d + c];
    }
  }
  return os.str();
}

}  // namespace

std::string System::name() const {
  const Impl& im = *impl_;
  std::ostringstream os;
  switch (im.kind) {
    case Kind::Identity:
      os << "identity";
      break;
    case Kind::FullShift:
      os << "full_shift:m=" << im.alphabet;
      if (im.stride != 1) os << ",stride=" << im.stride;
      break;
    case Kind::RealShift:
      os << "real_shift";
      if (im.stride != 1) os << ":stride=" << im.stride;
      break;
    case Kind::FormalDerivative:
      os << "formal_derivative";
      if (im.iter != 1) os << "^" << im.iter;
      break;
    case Kind::Product: {
      os << "product(";
      for (std::size_t f = 0; f < im.factors.size(); ++f) {
        if (f) os << "|";
        os << im.factors[f].name() << "@" << im.factor_dims[f];
      }
      os << ")";
      break;
    }
    case Kind::Linear:
      os << "linear:" << matrix_text(im.matrix, im.dim) << ":"
         << (im.lmetric == LinearMetric::Arctan ? "arctan" : "window");
      if (im.iter != 1) os << "^" << im.iter;
      break;
    case Kind::Torus:
      os << "torus:" << matrix_text(im.imatrix, im.dim);
      if (im.iter != 1) os << "^" << im.iter;
      break;
    case Kind::Tabulated:
      os << "tabulated(" << im.points.size() << ")";
      if (im.iter != 1) os << "^" << im.iter;
      break;
  }
  return os.str();
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == sep && depth == 0) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.emplace_back(s.substr(start));
  return out;
}

long long parse_int(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("cannot parse ") + what + " from '" + s + "'");
  }
}

double parse_real(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("cannot parse ") + what + " from '" + s + "'");
  }
}

// "2,1;1,1" -> row-major entries plus dimension
template <typename T>
std::pair<std::vector<T>, std::size_t> parse_matrix(const std::string& text, bool integral) {
  std::vector<T> entries;
  auto rows = split(text, ';');
  const std::size_t d = rows.size();
  for (const auto& row : rows) {
    auto cells = split(row, ',');
    if (cells.size() != d)
      throw UsageError("matrix '" + text + "' is not square");
    for (const auto& c : cells)
      entries.push_back(integral ? T(parse_int(c, "matrix entry"))
                                 : T(parse_real(c, "matrix entry")));
  }
  return {entries, d};
}

}  // namespace

System System::parse(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw UsageError("empty system spec");

  if (s.rfind("product(", 0) == 0 && s.back() == ')') {
    auto inner = s.substr(8, s.size() - 9);
    std::vector<System> factors;
    std::vector<std::size_t> dims;
    for (const auto& part : split(inner, '|')) {
      auto at = part.rfind('@');
      if (at == std::string::npos)
        throw UsageError("product factor '" + part + "' needs '@<dim>'");
      factors.push_back(System::parse(part.substr(0, at)));
      dims.push_back(std::size_t(parse_int(part.substr(at + 1), "factor dim")));
    }
    return System::product(std::move(factors), std::move(dims));
  }

  auto parts = split(s, ':');
  const std::string& head = parts[0];

  if (head == "identity") {
    std::size_t d = 1;
    if (parts.size() > 1) {
      auto kv = split(parts[1], '=');
      if (kv.size() == 2 && kv[0] == "d") d = std::size_t(parse_int(kv[1], "dimension"));
    }
    return System::identity(d);
  }
  if (head == "full_shift") {
    if (parts.size() < 2) throw UsageError("full_shift needs ':m=<alphabet>'");
    std::size_t m = 0, stride = 1;
    for (const auto& field : split(parts[1], ',')) {
      auto kv = split(field, '=');
      if (kv.size() != 2) throw UsageError("bad full_shift field '" + field + "'");
      if (kv[0] == "m") m = std::size_t(parse_int(kv[1], "alphabet"));
      else if (kv[0] == "stride") stride = std::size_t(parse_int(kv[1], "stride"));
      else throw UsageError("unknown full_shift field '" + kv[0] + "'");
    }
    return System::full_shift(m, stride);
  }
  if (head == "real_shift") return System::real_shift();
  if (head == "formal_derivative") return System::formal_derivative();
  if (head == "linear") {
    if (parts.size() < 2) throw UsageError("linear needs a matrix, e.g. linear:2");
    auto [entries, d] = parse_matrix<double>(parts[1], false);
    LinearMetric choice = LinearMetric::Arctan;
    double halfwidth = 1.0;
    if (parts.size() > 2) {
      auto kv = split(parts[2], '=');
      if (kv[0] == "arctan") choice = LinearMetric::Arctan;
      else if (kv[0] == "window") {
        choice = LinearMetric::Window;
        if (kv.size() == 2) halfwidth = parse_real(kv[1], "window halfwidth");
      } else {
        throw UsageError("unknown linear metric '" + parts[2] + "'");
      }
    }
    return System::linear(std::move(entries), d, choice, halfwidth);
  }
  if (head == "torus") {
    if (parts.size() < 2) throw UsageError("torus needs a matrix, e.g. torus:2,1;1,1");
    auto [entries, d] = parse_matrix<long long>(parts[1], true);
    return System::torus(std::move(entries), d);
  }
  throw UsageError("unknown system '" + head + "'");
}

}  // namespace entlab
