#include "qmanopt/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "qmanopt/errors.hpp"

namespace qmanopt {

namespace {

int popcount(std::uint64_t v) { return std::popcount(v); }

Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void require_same_qubits(int a, int b, const char* who) {
  if (a != b) {
    throw std::invalid_argument(std::string(who) + ": qubit counts differ (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

std::string PauliString::label() const {
  std::string s(static_cast<std::size_t>(qubits), 'I');
  for (int q = 0; q < qubits; ++q) {
    const bool x = (x_mask >> q) & 1u;
    const bool z = (z_mask >> q) & 1u;
    char c = 'I';
    if (x && z) c = 'Y';
    else if (x) c = 'X';
    else if (z) c = 'Z';
    s[static_cast<std::size_t>(qubits - 1 - q)] = c;  // leftmost = highest qubit
  }
  return s;
}

PauliString operator*(const PauliString& a, const PauliString& b) {
  require_same_qubits(a.qubits, b.qubits, "PauliString product");
  PauliString out;
  out.qubits = a.qubits;
  out.x_mask = a.x_mask ^ b.x_mask;
  out.z_mask = a.z_mask ^ b.z_mask;
  const int ipow = popcount(a.x_mask & a.z_mask) + popcount(b.x_mask & b.z_mask) -
                   popcount(out.x_mask & out.z_mask);
  const double sign = (popcount(a.z_mask & b.x_mask) % 2 == 0) ? 1.0 : -1.0;
  out.coeff = a.coeff * b.coeff * i_power(ipow) * sign;
  return out;
}

PauliSum PauliSum::identity(int qubits, Complex coeff) {
  PauliSum s(qubits);
  s.add(0, 0, coeff);
  return s;
}

void PauliSum::add(std::uint64_t x, std::uint64_t z, Complex coeff) {
  auto key_less = [](const PauliString& t, std::pair<std::uint64_t, std::uint64_t> key) {
    return std::make_pair(t.z_mask, t.x_mask) < key;
  };
  const auto key = std::make_pair(z, x);
  auto it = std::lower_bound(terms_.begin(), terms_.end(), key, key_less);
  if (it != terms_.end() && it->z_mask == z && it->x_mask == x) {
    it->coeff += coeff;
  } else {
    terms_.insert(it, PauliString{qubits_, x, z, coeff});
  }
}

void PauliSum::add(const PauliString& term) {
  require_same_qubits(qubits_, term.qubits, "PauliSum::add");
  add(term.x_mask, term.z_mask, term.coeff);
}

void PauliSum::prune(double tol) {
  std::erase_if(terms_, [tol](const PauliString& t) { return std::abs(t.coeff) <= tol; });
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
  require_same_qubits(qubits_, o.qubits_, "PauliSum::operator+=");
  for (const auto& t : o.terms_) add(t.x_mask, t.z_mask, t.coeff);
  return *this;
}

PauliSum PauliSum::operator+(const PauliSum& o) const {
  PauliSum out = *this;
  out += o;
  return out;
}

PauliSum PauliSum::operator*(const PauliSum& o) const {
  require_same_qubits(qubits_, o.qubits_, "PauliSum::operator*");
  PauliSum out(qubits_);
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      const PauliString p = a * b;
      out.add(p.x_mask, p.z_mask, p.coeff);
    }
  }
  return out;
}

PauliSum PauliSum::operator*(Complex s) const {
  PauliSum out = *this;
  for (auto& t : out.terms_) t.coeff *= s;
  return out;
}

double PauliSum::max_imag() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff.imag()));
  return m;
}

std::string PauliSum::to_text() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& t : terms_) {
    if (std::abs(t.coeff.imag()) > 1e-12 * (1.0 + std::abs(t.coeff.real()))) {
      throw std::invalid_argument("PauliSum::to_text: complex coefficients not representable");
    }
    out << t.coeff.real() << " " << t.label() << "\n";
  }
  return out.str();
}

PauliSum PauliSum::from_text(std::istream& in) {
  PauliSum out;
  std::string line;
  long lineno = 0;
  int qubits = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double coeff;
    std::string label;
    if (!(ls >> coeff)) {
      std::string probe;
      if (std::istringstream(line) >> probe && !probe.empty()) {
        throw ParseError("expected '<coefficient> <pauli string>', got '" + line + "'", lineno);
      }
      continue;  // blank / comment-only line
    }
    if (!(ls >> label)) throw ParseError("missing Pauli string after coefficient", lineno);
    if (qubits < 0) {
      qubits = static_cast<int>(label.size());
      out = PauliSum(qubits);
    } else if (static_cast<int>(label.size()) != qubits) {
      throw ParseError("inconsistent string length " + std::to_string(label.size()) +
                           " (expected " + std::to_string(qubits) + ")",
                       lineno);
    }
    std::uint64_t x = 0, z = 0;
    for (int pos = 0; pos < qubits; ++pos) {
      const int q = qubits - 1 - pos;
      switch (label[static_cast<std::size_t>(pos)]) {
        case 'I': break;
        case 'X': x |= 1ull << q; break;
        case 'Z': z |= 1ull << q; break;
        case 'Y': x |= 1ull << q; z |= 1ull << q; break;
        default:
          throw ParseError(std::string("invalid Pauli character '") +
                               label[static_cast<std::size_t>(pos)] + "'",
                           lineno);
      }
    }
    out.add(x, z, Complex(coeff, 0.0));
  }
  if (qubits < 0) throw ParseError("no Pauli terms found");
  return out;
}

PauliSum PauliSum::from_text(const std::string& text) {
  std::istringstream in(text);
  return from_text(in);
}

PauliSum pauli_decompose(const Matrix& m, double prune_tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("pauli_decompose: matrix must be square");
  const Index dim = m.rows();
  if (dim < 1 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("pauli_decompose: dimension " + std::to_string(dim) +
                                " is not a power of two");
  }
  int qubits = 0;
  while ((Index(1) << qubits) < dim) ++qubits;

  PauliSum out(qubits);
  const auto udim = static_cast<std::uint64_t>(dim);
  for (std::uint64_t x = 0; x < udim; ++x) {
    for (std::uint64_t z = 0; z < udim; ++z) {
      // Tr(W M) = Σ_k i^{|x∧z|} (−1)^{|k∧z|} M(k, k⊕x)
      double acc = 0.0;
      for (std::uint64_t k = 0; k < udim; ++k) {
        const double sign = (popcount(k & z) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * m(static_cast<Index>(k), static_cast<Index>(k ^ x));
      }
      const Complex coeff = i_power(popcount(x & z)) * acc / static_cast<double>(dim);
      if (std::abs(coeff) > prune_tol) out.add(x, z, coeff);
    }
  }
  return out;
}

Matrix pauli_to_matrix(const PauliSum& ps, int max_qubits) {
  if (ps.qubits() > max_qubits) {
    throw std::invalid_argument("pauli_to_matrix: " + std::to_string(ps.qubits()) +
                                " qubits exceeds cap of " + std::to_string(max_qubits));
  }
  const Index dim = Index(1) << ps.qubits();
  Matrix m = Matrix::Zero(dim, dim);
  double max_imag = 0.0;
  for (const auto& t : ps.terms()) {
    const Complex phase = t.coeff * i_power(popcount(t.x_mask & t.z_mask));
    for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(dim); ++k) {
      const double sign = (popcount(k & t.z_mask) % 2 == 0) ? 1.0 : -1.0;
      const Complex v = phase * sign;
      m(static_cast<Index>(k ^ t.x_mask), static_cast<Index>(k)) += v.real();
      max_imag = std::max(max_imag, std::abs(v.imag()));
    }
  }
  if (max_imag > 1e-10) {
    throw std::invalid_argument("pauli_to_matrix: realization is not real (|imag| = " +
                                std::to_string(max_imag) + ")");
  }
  return m;
}

PauliSum pauli_kron(const PauliSum& high, const PauliSum& low) {
  PauliSum out(high.qubits() + low.qubits());
  const int shift = low.qubits();
  for (const auto& a : high.terms()) {
    for (const auto& b : low.terms()) {
      out.add((a.x_mask << shift) | b.x_mask, (a.z_mask << shift) | b.z_mask,
              a.coeff * b.coeff);
    }
  }
  return out;
}

double pauli_expectation(const PauliString& term, const Vector& v) {
  const auto dim = static_cast<std::uint64_t>(v.size());
  if (popcount(term.x_mask & term.z_mask) % 2 == 1) return 0.0;  // odd-Y on a real state
  const double phase_sign = (popcount(term.x_mask & term.z_mask) % 4 == 2) ? -1.0 : 1.0;
  double acc = 0.0;
  for (std::uint64_t k = 0; k < dim; ++k) {
    const double sign = (popcount(k & term.z_mask) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * v(static_cast<Index>(k ^ term.x_mask)) * v(static_cast<Index>(k));
  }
  return phase_sign * acc;
}

}  // namespace qmanopt
