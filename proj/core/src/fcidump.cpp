#include "qmanopt/fcidump.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "qmanopt/errors.hpp"

namespace qmanopt {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

// Fortran floats may use D exponents.
double parse_value(const std::string& token, long lineno) {
  std::string t = token;
  for (auto& c : t) {
    if (c == 'D' || c == 'd') c = 'E';
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ParseError("malformed numeric value '" + token + "'", lineno);
  }
  if (used != t.size()) throw ParseError("malformed numeric value '" + token + "'", lineno);
  return v;
}

void set_two_body(FcidumpData& data, int p, int q, int r, int s, double v) {
  const int m = data.norb;
  auto at = [&](int a, int b, int c, int d) -> double& {
    return data.two_body[static_cast<std::size_t>(((a * m + b) * m + c) * m + d)];
  };
  // 8-fold permutation symmetry of real chemists' integrals
  at(p, q, r, s) = v;
  at(q, p, r, s) = v;
  at(p, q, s, r) = v;
  at(q, p, s, r) = v;
  at(r, s, p, q) = v;
  at(s, r, p, q) = v;
  at(r, s, q, p) = v;
  at(s, r, q, p) = v;
}

}  // namespace

FcidumpData parse_fcidump(std::istream& in) {
  FcidumpData data;
  std::string line;
  long lineno = 0;

  // header: collect until &END or /
  std::string header;
  bool header_done = false;
  while (!header_done && std::getline(in, line)) {
    ++lineno;
    std::string u = upper(line);
    const auto end_kw = u.find("&END");
    const auto slash = u.find('/');
    if (end_kw != std::string::npos) {
      header += u.substr(0, end_kw);
      header_done = true;
    } else if (slash != std::string::npos) {
      header += u.substr(0, slash);
      header_done = true;
    } else {
      header += u;
    }
    header += ' ';
  }
  if (!header_done) throw ParseError("missing &END (or /) header terminator", lineno);

  const auto fci = header.find("&FCI");
  if (fci == std::string::npos) throw ParseError("missing &FCI header", 1);
  std::string body = header.substr(fci + 4);
  for (auto& c : body) {
    if (c == ',' || c == '\t' || c == '\n') c = ' ';
  }

  bool have_norb = false, have_nelec = false;
  std::istringstream hs(body);
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    std::string key = tok;
    std::string value;
    if (eq != std::string::npos) {
      key = tok.substr(0, eq);
      value = tok.substr(eq + 1);
    }
    if (value.empty() && eq != std::string::npos) hs >> value;
    if (key == "NORB") {
      data.norb = std::stoi(value);
      have_norb = true;
    } else if (key == "NELEC") {
      data.nelec = std::stoi(value);
      have_nelec = true;
    } else if (key == "MS2") {
      data.ms2 = std::stoi(value);
    } else if (key == "ORBSYM") {
      // list continues over whitespace-separated integers
      data.orbsym.clear();
      std::istringstream vs(value);
      std::string item;
      while (std::getline(vs, item, ',')) {
        if (!item.empty()) data.orbsym.push_back(std::stoi(item));
      }
      std::streampos mark = hs.tellg();
      while (hs >> tok) {
        if (tok.find('=') != std::string::npos || !std::isdigit(static_cast<unsigned char>(tok[0]))) {
          hs.clear();
          hs.seekg(mark);
          break;
        }
        data.orbsym.push_back(std::stoi(tok));
        mark = hs.tellg();
      }
    }
    // other keys (ISYM, IUHF, ...) are accepted and ignored
  }
  if (!have_norb) throw ParseError("header is missing NORB", 1);
  if (!have_nelec) throw ParseError("header is missing NELEC", 1);
  if (data.norb < 1) throw ParseError("NORB must be positive", 1);

  const int m = data.norb;
  data.one_body = Matrix::Zero(m, m);
  data.two_body.assign(static_cast<std::size_t>(m) * m * m * m, 0.0);
  data.orbital_energies.assign(static_cast<std::size_t>(m), 0.0);

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string vtok;
    if (!(ls >> vtok)) continue;  // blank
    const double value = parse_value(vtok, lineno);
    int idx[4];
    for (int k = 0; k < 4; ++k) {
      if (!(ls >> idx[k])) throw ParseError("expected four indices after value", lineno);
    }
    std::string extra;
    if (ls >> extra) throw ParseError("trailing token '" + extra + "'", lineno);
    for (int k = 0; k < 4; ++k) {
      if (idx[k] < 0 || idx[k] > m) {
        throw ParseError("orbital index " + std::to_string(idx[k]) + " out of range [0," +
                             std::to_string(m) + "]",
                         lineno);
      }
    }
    const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      data.core_energy = value;
    } else if (j == 0 && k == 0 && l == 0) {
      data.orbital_energies[static_cast<std::size_t>(i - 1)] = value;
    } else if (k == 0 && l == 0) {
      if (i == 0) throw ParseError("one-body line with zero first index", lineno);
      data.one_body(i - 1, j - 1) = value;
      data.one_body(j - 1, i - 1) = value;
    } else if (i == 0 || j == 0 || k == 0 || l == 0) {
      throw ParseError("mixed zero/nonzero indices", lineno);
    } else {
      set_two_body(data, i - 1, j - 1, k - 1, l - 1, value);
    }
  }
  return data;
}

FcidumpData parse_fcidump(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

FcidumpData parse_fcidump_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_fcidump(in);
}

}  // namespace qmanopt
