#include "fodgmm/panel.hpp"

#include "fodgmm/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace fodgmm {

PanelDataset::PanelDataset(Eigen::MatrixXd y, std::vector<Eigen::MatrixXd> x,
                           std::vector<std::string> unit_ids,
                           std::vector<std::int64_t> period_labels)
    : y_(std::move(y)),
      x_(std::move(x)),
      unit_ids_(std::move(unit_ids)),
      period_labels_(std::move(period_labels)) {
  for (const auto& xk : x_) {
    if (xk.rows() != y_.rows() || xk.cols() != y_.cols()) {
      throw std::invalid_argument("PanelDataset: regressor shape differs from y");
    }
  }
  if (!unit_ids_.empty() && static_cast<Index>(unit_ids_.size()) != y_.rows()) {
    throw std::invalid_argument("PanelDataset: unit id count differs from n");
  }
  if (!period_labels_.empty() &&
      static_cast<Index>(period_labels_.size()) != y_.cols()) {
    throw std::invalid_argument("PanelDataset: period label count differs from T");
  }
}

bool PanelDataset::operator==(const PanelDataset& o) const {
  return y_ == o.y_ && x_ == o.x_ && unit_ids_ == o.unit_ids_ &&
         period_labels_ == o.period_labels_;
}

std::vector<Violation> validate(const PanelDataset& p) {
  std::vector<Violation> out;
  if (p.n() < 1) {
    out.push_back({ViolationKind::NoUnits, {}, {}, {}, "panel has no units"});
  }
  if (p.periods() < 3) {
    out.push_back({ViolationKind::TooFewPeriods, {}, {}, {},
                   "need at least 3 periods, have " + std::to_string(p.periods())});
  }
  if (p.regressors() < 1) {
    out.push_back({ViolationKind::NoRegressors, {}, {}, {}, "panel has no regressors"});
  }
  auto scan = [&](const Eigen::MatrixXd& m, std::optional<Index> k) {
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index t = 0; t < m.cols(); ++t) {
        if (!std::isfinite(m(i, t))) {
          std::ostringstream msg;
          msg << "non-finite value at (" << i << "," << t;
          if (k) msg << "," << *k;
          msg << ")";
          out.push_back({ViolationKind::NonFiniteValue, i, t, k, msg.str()});
        }
      }
    }
  };
  scan(p.y(), std::nullopt);
  for (Index k = 0; k < p.regressors(); ++k) scan(p.x(k), k);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    fields.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    parse_fail(line_no, "malformed number '" + std::string(s) + "'");
  }
  if (!std::isfinite(v)) {
    parse_fail(line_no, "non-finite value '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_period(std::string_view s, std::size_t line_no) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    parse_fail(line_no, "malformed period '" + std::string(s) + "'");
  }
  return v;
}

struct Row {
  std::size_t unit;
  std::int64_t period;
  std::vector<double> values;  // y then x1..xK
  std::size_t line_no;
};

}  // namespace

PanelDataset read_panel(std::istream& in, const PanelSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    for (auto f : split(line, schema.delimiter)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, "missing header");

  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::ParseError, "missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t unit_col = column(schema.unit);
  const std::size_t period_col = column(schema.period);
  std::vector<std::size_t> value_cols{column(schema.y)};
  if (schema.x.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != unit_col && c != period_col && c != value_cols.front()) {
        value_cols.push_back(c);
      }
    }
  } else {
    for (const auto& name : schema.x) value_cols.push_back(column(name));
  }
  if (value_cols.size() < 2) {
    throw Error(ErrorCode::ParseError, "no regressor columns");
  }

  std::vector<std::string> units;
  std::unordered_map<std::string, std::size_t> unit_index;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, schema.delimiter);
    if (fields.size() != header.size()) {
      parse_fail(line_no, "expected " + std::to_string(header.size()) +
                              " fields, found " + std::to_string(fields.size()));
    }
    std::string id(fields[unit_col]);
    if (id.empty()) parse_fail(line_no, "empty unit id");
    auto [it, inserted] = unit_index.emplace(id, units.size());
    if (inserted) units.push_back(id);
    Row row{it->second, parse_period(fields[period_col], line_no), {}, line_no};
    for (auto c : value_cols) row.values.push_back(parse_double(fields[c], line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "no data rows");

  std::vector<std::int64_t> labels;
  for (const auto& r : rows) labels.push_back(r.period);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::map<std::int64_t, Index> period_index;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    period_index[labels[t]] = static_cast<Index>(t);
  }

  const auto n = static_cast<Index>(units.size());
  const auto T = static_cast<Index>(labels.size());
  const auto K = static_cast<Index>(value_cols.size() - 1);
  Eigen::MatrixXd y(n, T);
  std::vector<Eigen::MatrixXd> x(static_cast<std::size_t>(K), Eigen::MatrixXd(n, T));
  std::vector<char> seen(static_cast<std::size_t>(n * T), 0);
  for (const auto& r : rows) {
    const auto i = static_cast<Index>(r.unit);
    const Index t = period_index.at(r.period);
    auto& flag = seen[static_cast<std::size_t>(i * T + t)];
    if (flag) {
      throw Error(ErrorCode::DuplicateCell,
                  "unit '" + units[r.unit] + "' period " + std::to_string(r.period) +
                      " appears twice (line " + std::to_string(r.line_no) + ")");
    }
    flag = 1;
    y(i, t) = r.values[0];
    for (Index k = 0; k < K; ++k) x[static_cast<std::size_t>(k)](i, t) = r.values[static_cast<std::size_t>(k + 1)];
  }
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < T; ++t) {
      if (!seen[static_cast<std::size_t>(i * T + t)]) {
        throw Error(ErrorCode::UnbalancedPanel,
                    "unit '" + units[static_cast<std::size_t>(i)] + "' has no row for period " +
                        std::to_string(labels[static_cast<std::size_t>(t)]));
      }
    }
  }
  return PanelDataset(std::move(y), std::move(x), std::move(units), std::move(labels));
}

PanelDataset load_panel(const std::filesystem::path& path, const PanelSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_panel(in, schema);
}

void write_panel(const PanelDataset& p, std::ostream& out, const PanelSchema& schema) {
  const char d = schema.delimiter;
  out << schema.unit << d << schema.period << d << schema.y;
  for (Index k = 0; k < p.regressors(); ++k) {
    out << d;
    if (static_cast<Index>(schema.x.size()) == p.regressors()) {
      out << schema.x[static_cast<std::size_t>(k)];
    } else {
      out << 'x' << (k + 1);
    }
  }
  out << '\n';
  out << std::setprecision(17);
  for (Index i = 0; i < p.n(); ++i) {
    for (Index t = 0; t < p.periods(); ++t) {
      if (p.unit_ids().empty()) {
        out << (i + 1);
      } else {
        out << p.unit_ids()[static_cast<std::size_t>(i)];
      }
      out << d;
      if (p.period_labels().empty()) {
        out << t;
      } else {
        out << p.period_labels()[static_cast<std::size_t>(t)];
      }
      out << d << p.y(i, t);
      for (Index k = 0; k < p.regressors(); ++k) out << d << p.x(i, t, k);
      out << '\n';
    }
  }
}

void write_panel(const PanelDataset& p, const std::filesystem::path& path,
                 const PanelSchema& schema) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_panel(p, out, schema);
}

}  // namespace fodgmm
