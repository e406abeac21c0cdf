#pragma once

// CSV and JSON emission.  Numeric CSV format: 17 significant digits, dot
// decimal, newline-terminated rows, mandatory header.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoops/algebra.hpp"
#include "hoops/langevin.hpp"

namespace hoops {

using json = nlohmann::json;

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw std::invalid_argument("csv row width mismatch");
    rows_.push_back(row);
  }
  void add_row_mixed(const std::vector<std::string>& row) {
    if (row.size() != header_.size()) throw std::invalid_argument("csv row width mismatch");
    string_rows_.push_back({rows_.size(), row});
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header_.size(); ++i)
      os << header_[i] << (i + 1 < header_.size() ? "," : "");
    os << "\n";
    std::size_t si = 0;
    for (std::size_t r = 0; r <= rows_.size(); ++r) {
      while (si < string_rows_.size() && string_rows_[si].first == r) {
        const auto& row = string_rows_[si].second;
        for (std::size_t i = 0; i < row.size(); ++i)
          os << row[i] << (i + 1 < row.size() ? "," : "");
        os << "\n";
        ++si;
      }
      if (r == rows_.size()) break;
      for (std::size_t i = 0; i < rows_[r].size(); ++i)
        os << format_double(rows_[r][i]) << (i + 1 < rows_[r].size() ? "," : "");
      os << "\n";
    }
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> string_rows_;
};

inline json to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Eigen::MatrixXcd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(to_json(M(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline json to_json(const Eigen::VectorXcd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

/// Polynomial wire format: list of {modes: {label: [c_exp, a_exp]}, coeff: [re, im]}.
inline json to_json(const OperatorPolynomial& p) {
  json terms = json::array();
  for (const auto& [sig, coeff] : p.terms()) {
    json modes = json::object();
    for (std::size_t m = 0; m < sig.size(); ++m) {
      if (sig[m].c == 0 && sig[m].a == 0) continue;
      modes[p.context().mode(m).label] = json::array({sig[m].c, sig[m].a});
    }
    terms.push_back({{"modes", modes}, {"coeff", to_json(coeff)}});
  }
  return terms;
}

inline OperatorPolynomial polynomial_from_json(const ModeSet& ctx, const json& j) {
  OperatorPolynomial p(ctx);
  for (const auto& term : j) {
    MonoSig sig(ctx.size());
    for (auto it = term.at("modes").begin(); it != term.at("modes").end(); ++it) {
      auto idx = ctx.index(it.key());
      sig[idx].c = it.value().at(0).get<int>();
      sig[idx].a = it.value().at(1).get<int>();
    }
    auto c = term.at("coeff");
    p.add_term(sig, cplx(c.at(0).get<double>(), c.at(1).get<double>()));
  }
  return p;
}

inline const char* frame_name(Frame f) {
  switch (f) {
    case Frame::rotating: return "rotating";
    case Frame::absolute: return "absolute";
    default: return "normalized";
  }
}

inline json to_json(const LangevinSystem& s) {
  json j;
  j["basis"] = s.basis_labels;
  j["M"] = to_json(s.M);
  j["noise_map"] = to_json(Eigen::MatrixXcd(s.noise_map));
  j["drive"] = to_json(s.drive);
  j["frame"] = frame_name(s.frame);
  j["time_scale"] = s.time_scale;
  json ch = json::array();
  for (const auto& c : s.channels) {
    json e{{"label", c.label}, {"S_plus", c.S_plus}, {"S_minus", c.S_minus}};
    if (c.silent) e["silent"] = *c.silent;
    ch.push_back(e);
  }
  j["channels"] = ch;
  json dr = json::array();
  for (Eigen::Index i = 0; i < s.decay_rates.size(); ++i) dr.push_back(s.decay_rates(i));
  j["decay_rates"] = dr;
  j["means"] = {{"n", s.means_used.n},
                {"m", s.means_used.m},
                {"b", to_json(s.means_used.b)},
                {"d", to_json(s.means_used.d)}};
  return j;
}

}  // namespace hoops
