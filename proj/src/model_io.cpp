#include "bpr/model_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bpr/errors.hpp"

namespace bpr {

namespace {

void write_double(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

void write_row(std::ostream& out, std::span<const double> row) {
  for (std::size_t n = 0; n < row.size(); ++n) {
    if (n) out << ' ';
    write_double(out, row[n]);
  }
  out << '\n';
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos == line.size()) break;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    out.push_back(line.substr(start, pos - start));
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::vector<std::string_view> next_row(const char* what) {
    if (!std::getline(in_, line_)) {
      throw FormatError(std::string("truncated model file: missing ") + what + " (line " +
                        std::to_string(line_no_ + 1) + ")");
    }
    ++line_no_;
    return tokens(line_);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

template <class T>
T parse_number(std::string_view tok, std::size_t line_no) {
  T v{};
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw FormatError("bad number '" + std::string(tok) + "' on line " + std::to_string(line_no));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw FormatError("non-finite value on line " + std::to_string(line_no));
  }
  return v;
}

void read_row(Reader& r, std::span<double> dest, const char* what) {
  const auto toks = r.next_row(what);
  if (toks.size() != dest.size()) {
    throw FormatError("dimension mismatch on line " + std::to_string(r.line_no()) + ": expected " +
                      std::to_string(dest.size()) + " values, found " + std::to_string(toks.size()));
  }
  for (std::size_t n = 0; n < dest.size(); ++n) dest[n] = parse_number<double>(toks[n], r.line_no());
}

std::vector<std::size_t> read_dims(Reader& r, std::size_t expected) {
  const auto toks = r.next_row("dimension line");
  if (toks.size() != expected) {
    throw FormatError("dimension line needs " + std::to_string(expected) + " fields, found " +
                      std::to_string(toks.size()));
  }
  std::vector<std::size_t> dims;
  for (const auto tok : toks) dims.push_back(parse_number<std::size_t>(tok, r.line_no()));
  return dims;
}

}  // namespace

void save_model(std::ostream& out, const Model& m) {
  if (const auto* mf = std::get_if<MFModel>(&m)) {
    out << "BPRMODEL mf " << kModelFormatVersion << '\n';
    out << mf->num_users() << ' ' << mf->num_items() << ' ' << mf->k() << '\n';
    for (UserIndex u = 0; u < mf->num_users(); ++u) write_row(out, mf->user_row(u));
    for (ItemIndex i = 0; i < mf->num_items(); ++i) write_row(out, mf->item_row(i));
  } else if (const auto* knn = std::get_if<KNNModel>(&m)) {
    const std::size_t n = knn->num_items();
    out << "BPRMODEL knn " << kModelFormatVersion << '\n' << n << '\n';
    std::span<const double> cells = knn->cells();
    std::size_t offset = 0;
    for (std::size_t a = 0; a + 1 < n; ++a) {
      const std::size_t len = n - 1 - a;
      write_row(out, cells.subspan(offset, len));
      offset += len;
    }
  } else {
    const auto& pop = std::get<PopularityModel>(m);
    out << "BPRMODEL pop " << kModelFormatVersion << '\n' << pop.num_items() << '\n';
    const auto& counts = pop.counts();
    for (std::size_t n = 0; n < counts.size(); ++n) {
      if (n) out << ' ';
      out << counts[n];
    }
    out << '\n';
  }
}

Model load_model(std::istream& in) {
  Reader r(in);
  const auto header = r.next_row("header");
  if (header.size() != 3 || header[0] != "BPRMODEL") throw FormatError("missing BPRMODEL header");
  const std::string kind(header[1]);
  const int version = parse_number<int>(header[2], 1);
  if (version != kModelFormatVersion) {
    throw VersionError("unsupported model format version " + std::to_string(version));
  }

  if (kind == "mf") {
    const auto dims = read_dims(r, 3);
    if (dims[2] < 1) throw FormatError("mf model needs k >= 1");
    MFModel m(dims[0], dims[1], dims[2]);
    for (UserIndex u = 0; u < dims[0]; ++u) read_row(r, m.user_row(u), "user factor row");
    for (ItemIndex i = 0; i < dims[1]; ++i) read_row(r, m.item_row(i), "item factor row");
    return m;
  }
  if (kind == "knn") {
    const auto dims = read_dims(r, 1);
    const std::size_t n = dims[0];
    KNNModel m(n);
    std::span<double> cells = m.cells();
    std::size_t offset = 0;
    for (std::size_t a = 0; a + 1 < n; ++a) {
      const std::size_t len = n - 1 - a;
      read_row(r, cells.subspan(offset, len), "similarity row");
      offset += len;
    }
    return m;
  }
  if (kind == "pop") {
    const auto dims = read_dims(r, 1);
    const auto toks = r.next_row("count row");
    if (toks.size() != dims[0]) {
      throw FormatError("dimension mismatch: expected " + std::to_string(dims[0]) + " counts, found " +
                        std::to_string(toks.size()));
    }
    std::vector<std::uint64_t> counts;
    counts.reserve(toks.size());
    for (const auto tok : toks) counts.push_back(parse_number<std::uint64_t>(tok, r.line_no()));
    return PopularityModel(std::move(counts));
  }
  throw FormatError("unknown model kind '" + kind + "'");
}

}  // namespace bpr
