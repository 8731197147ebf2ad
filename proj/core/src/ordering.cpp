#include "seldet/ordering.hpp"

#include <fstream>
#include <istream>
#include <vector>

namespace seldet {

Permutation natural_order(Index n) { return Permutation::identity(n); }

Permutation load_order(std::istream& in, Index n) {
  std::vector<Index> p;
  p.reserve(static_cast<std::size_t>(n));
  long long v = 0;
  while (in >> v) p.push_back(static_cast<Index>(v));
  if (!in.eof()) throw Error(ErrorKind::NotAPermutation, "non-integer token in ordering");
  if (static_cast<Index>(p.size()) != n) {
    throw Error(ErrorKind::SizeMismatch,
                "ordering has " + std::to_string(p.size()) + " entries, expected " + std::to_string(n));
  }
  return Permutation(std::move(p));
}

Permutation load_order(const std::filesystem::path& path, Index n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return load_order(in, n);
}

OrderingSpec OrderingSpec::parse(const std::string& text) {
  OrderingSpec spec;
  if (text == "natural") {
    spec.kind = Kind::Natural;
  } else if (text == "amd") {
    spec.kind = Kind::Amd;
  } else if (text.rfind("file:", 0) == 0 && text.size() > 5) {
    spec.kind = Kind::File;
    spec.file = text.substr(5);
  } else {
    throw Error(ErrorKind::ConfigInvalid, "unknown ordering '" + text + "'");
  }
  return spec;
}

std::string OrderingSpec::name() const {
  switch (kind) {
    case Kind::Natural: return "natural";
    case Kind::Amd: return "amd";
    case Kind::File: return "file:" + file.string();
  }
  return "?";
}

Permutation compute_ordering(const SparseSymmetric& a, const OrderingSpec& spec) {
  switch (spec.kind) {
    case OrderingSpec::Kind::Natural: return natural_order(a.size());
    case OrderingSpec::Kind::Amd: return amd_order(a);
    case OrderingSpec::Kind::File: return load_order(spec.file, a.size());
  }
  return natural_order(a.size());
}

}  // namespace seldet
