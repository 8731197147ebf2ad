#include "seldet/dataset.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace seldet {

namespace {

std::size_t uz(Index i) { return static_cast<std::size_t>(i); }

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

void check_factor(const Factor& f, Index n, const std::string& what) {
  if (static_cast<Index>(f.level.size()) != n) {
    throw Error(ErrorKind::SizeMismatch, what + " '" + f.name + "' has " + std::to_string(f.level.size()) +
                                             " entries for " + std::to_string(n) + " observations");
  }
  for (Index l : f.level) {
    if (l < -1 || l >= f.levels()) {
      throw Error(ErrorKind::IndexOutOfRange, what + " '" + f.name + "' level " + std::to_string(l));
    }
  }
}

}  // namespace

Factor Factor::from_labels(std::string name, const std::vector<std::string>& per_observation) {
  Factor f;
  f.name = std::move(name);
  std::unordered_map<std::string, Index> ids;
  f.level.reserve(per_observation.size());
  for (const auto& label : per_observation) {
    auto [it, inserted] = ids.try_emplace(label, f.levels());
    if (inserted) f.labels.push_back(label);
    f.level.push_back(it->second);
  }
  return f;
}

Index MixedModelDataset::b() const {
  Index b = 0;
  for (const auto& f : random_factors) b += f.levels();
  return b;
}

std::vector<Index> MixedModelDataset::factor_offsets() const {
  std::vector<Index> off;
  Index acc = 0;
  for (const auto& f : random_factors) {
    off.push_back(acc);
    acc += f.levels();
  }
  return off;
}

void MixedModelDataset::validate() const {
  const Index n = n_obs();
  if (X.rows() != n) {
    throw Error(ErrorKind::SizeMismatch, "X has " + std::to_string(X.rows()) + " rows for n=" + std::to_string(n));
  }
  for (const auto& f : random_factors) {
    check_factor(f, n, "random factor");
    if (f.levels() == 0) throw Error(ErrorKind::EmptyFactor, "random factor '" + f.name + "' has no levels");
  }
  check_factor(residual_blocks, n, "residual blocks");
  for (Index l : residual_blocks.level) {
    if (l < 0) throw Error(ErrorKind::IndexOutOfRange, "observation without a residual block");
  }
  if (p() == 0) throw Error(ErrorKind::RankDeficientX, "X has no columns");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < p()) {
    throw Error(ErrorKind::RankDeficientX,
                "X has rank " + std::to_string(qr.rank()) + " < p=" + std::to_string(p()));
  }
}

Eigen::MatrixXd design_from_factors(Index n, const std::vector<Factor>& fixed) {
  Index p = 1;
  for (const auto& f : fixed) p += std::max<Index>(f.levels() - 1, 0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, p);
  x.col(0).setOnes();
  Index col = 1;
  for (const auto& f : fixed) {
    check_factor(f, n, "fixed factor");
    for (Index o = 0; o < n; ++o) {
      const Index l = f.level[uz(o)];
      if (l > 0) x(o, col + l - 1) = 1.0;
    }
    col += std::max<Index>(f.levels() - 1, 0);
  }
  return x;
}

MixedModelDataset make_dataset(std::vector<double> y, std::vector<Factor> fixed, std::vector<Factor> random,
                               Factor residual) {
  MixedModelDataset d;
  const Index n = static_cast<Index>(y.size());
  d.y = std::move(y);
  d.X = design_from_factors(n, fixed);
  d.fixed_factors = std::move(fixed);
  d.random_factors = std::move(random);
  if (residual.labels.empty()) {
    residual.labels = {"all"};
    residual.level.assign(uz(n), 0);
  }
  d.residual_blocks = std::move(residual);
  d.validate();
  return d;
}

MixedModelDataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "empty dataset");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_tabs(line);

  enum class Role { Response, Fixed, Random, Resid };
  std::vector<Role> roles;
  std::vector<std::string> names;
  int resid_columns = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& h = header[c];
    if (c == 0) {
      roles.push_back(Role::Response);
      names.push_back(h);
      continue;
    }
    const auto colon = h.find(':');
    const std::string kind = colon == std::string::npos ? "" : h.substr(0, colon);
    const std::string name = colon == std::string::npos ? h : h.substr(colon + 1);
    if (kind == "fixed") {
      roles.push_back(Role::Fixed);
    } else if (kind == "random") {
      roles.push_back(Role::Random);
    } else if (kind == "resid") {
      roles.push_back(Role::Resid);
      ++resid_columns;
    } else {
      throw Error(ErrorKind::ParseError, "column '" + h + "' needs a fixed:, random: or resid: prefix");
    }
    if (name.empty()) throw Error(ErrorKind::ParseError, "empty column name in header");
    names.push_back(name);
  }
  if (resid_columns > 1) throw Error(ErrorKind::ParseError, "more than one resid: column");

  std::vector<double> y;
  std::vector<std::vector<std::string>> cells(header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + " has " +
                                             std::to_string(fields.size()) + " fields, expected " +
                                             std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (fields[c] == "NA") {
        throw Error(ErrorKind::ParseError, "missing value (NA) on line " + std::to_string(line_no));
      }
      if (fields[c].empty()) throw Error(ErrorKind::ParseError, "empty field on line " + std::to_string(line_no));
    }
    const char* begin = fields[0].c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE) {
      throw Error(ErrorKind::ParseError, "bad response '" + fields[0] + "' on line " + std::to_string(line_no));
    }
    y.push_back(v);
    for (std::size_t c = 1; c < fields.size(); ++c) cells[c].push_back(fields[c]);
  }

  std::vector<Factor> fixed, random;
  Factor resid;
  for (std::size_t c = 1; c < header.size(); ++c) {
    Factor f = Factor::from_labels(names[c], cells[c]);
    switch (roles[c]) {
      case Role::Fixed: fixed.push_back(std::move(f)); break;
      case Role::Random: random.push_back(std::move(f)); break;
      case Role::Resid: resid = std::move(f); break;
      case Role::Response: break;
    }
  }
  return make_dataset(std::move(y), std::move(fixed), std::move(random), std::move(resid));
}

MixedModelDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return read_dataset(in);
}

void write_dataset(const MixedModelDataset& d, std::ostream& out) {
  const bool resid = !d.residual_blocks.name.empty();
  out << "y";
  for (const auto& f : d.fixed_factors) out << "\tfixed:" << f.name;
  for (const auto& f : d.random_factors) out << "\trandom:" << f.name;
  if (resid) out << "\tresid:" << d.residual_blocks.name;
  out << '\n';
  auto label = [](const Factor& f, Index o) -> const std::string& {
    const Index l = f.level[uz(o)];
    if (l < 0) throw Error(ErrorKind::IoError, "factor '" + f.name + "' has an observation without a level");
    return f.labels[uz(l)];
  };
  std::ostringstream num;
  num << std::setprecision(17);
  for (Index o = 0; o < d.n_obs(); ++o) {
    num.str("");
    num << d.y[uz(o)];
    out << num.str();
    for (const auto& f : d.fixed_factors) out << '\t' << label(f, o);
    for (const auto& f : d.random_factors) out << '\t' << label(f, o);
    if (resid) out << '\t' << label(d.residual_blocks, o);
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed");
}

void write_dataset(const MixedModelDataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  write_dataset(d, out);
}

}  // namespace seldet
