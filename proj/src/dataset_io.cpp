// On-disk dataset format, version 1.
//
//   magic  "STBD1" (5 bytes; "STBD" + version digit)
//   u32    nvar          (all integers little-endian)
//   u64    nobs
//   per variable: u16 name len + bytes, u8 stype tag,
//                 u16 label-table name len + bytes (len 0 if none)
//   u32    label table count (attached tables only)
//   per table: u16 name len + bytes, u32 entry count,
//              per entry: i32 code, u16 label len + bytes
//   column-major payload: numeric cells at native width (float/double as
//   IEEE bit patterns), string cells as u32 len + bytes + u8 binary flag.
//
// Sentinel bit patterns ride through untouched, which is the point of a
// binary format: store-then-load is the identity on the dataset.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>

#include "statbridge/errors.hpp"
#include "statbridge/workspace.hpp"

namespace statbridge {

namespace {

constexpr char kMagic[5] = {'S', 'T', 'B', 'D', '1'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), n); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u16(std::uint16_t v) { le(v); }
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void i32(std::int32_t v) { le(static_cast<std::uint32_t>(v)); }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }

  void str16(const std::string& s) {
    if (s.size() > 0xFFFF) fail("name too long for dataset file");
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  template <typename U>
  void le(U v) {
    std::uint8_t buf[sizeof(U)];
    for (std::size_t k = 0; k < sizeof(U); ++k) buf[k] = static_cast<std::uint8_t>(v >> (8 * k));
    bytes(buf, sizeof(U));
  }

  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail("truncated dataset file");
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint16_t u16() { return le<std::uint16_t>(); }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(le<std::uint32_t>()); }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }

  std::string str16() {
    const std::size_t n = u16();
    std::string s(n, '\0');
    if (n) bytes(s.data(), n);
    return s;
  }

 private:
  template <typename U>
  U le() {
    std::uint8_t buf[sizeof(U)];
    bytes(buf, sizeof(U));
    U v = 0;
    for (std::size_t k = 0; k < sizeof(U); ++k) v |= static_cast<U>(buf[k]) << (8 * k);
    return v;
  }

  std::istream& in_;
};

}  // namespace

void Workspace::store_dataset(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open " + path + " for writing");
  Writer w(out);

  w.bytes(kMagic, sizeof kMagic);
  w.u32(static_cast<std::uint32_t>(dataset_.nvar()));
  w.u64(dataset_.nobs);

  std::set<std::string> attached;
  for (const auto& v : dataset_.variables) {
    w.str16(v.name());
    w.u8(static_cast<std::uint8_t>(v.stype()));
    w.str16(v.label_table());
    if (!v.label_table().empty()) attached.insert(v.label_table());
  }

  w.u32(static_cast<std::uint32_t>(attached.size()));
  for (const auto& name : attached) {
    const auto& table = label_table(name);
    w.str16(table.name);
    w.u32(static_cast<std::uint32_t>(table.labels.size()));
    for (const auto& [code, text] : table.labels) {
      w.i32(code);
      w.str16(text);
    }
  }

  for (const auto& v : dataset_.variables) {
    for (std::size_t i = 0; i < dataset_.nobs; ++i) {
      switch (v.stype()) {
        case StorageType::SByte: w.u8(static_cast<std::uint8_t>(v.raw_int(i))); break;
        case StorageType::SInt: w.u16(static_cast<std::uint16_t>(v.raw_int(i))); break;
        case StorageType::SLong: w.u32(static_cast<std::uint32_t>(v.raw_int(i))); break;
        case StorageType::SFloat: w.f32(static_cast<float>(v.as_double(i))); break;
        case StorageType::SDouble: w.f64(v.as_double(i)); break;
        case StorageType::SStr:
        case StorageType::SStrL: {
          const StrCell& cell = v.str_cell(i);
          w.u32(static_cast<std::uint32_t>(cell.bytes.size()));
          w.bytes(cell.bytes.data(), cell.bytes.size());
          w.u8(cell.binary ? 1 : 0);
          break;
        }
      }
    }
  }
  if (!out) fail("write failed for " + path);
}

void Workspace::load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  Reader r(in);

  char magic[5];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, 4) != 0) fail("not a statbridge dataset: " + path);
  if (magic[4] != kMagic[4])
    fail(std::string("unsupported dataset version '") + magic[4] + "'");

  const std::size_t nvar = r.u32();
  const std::size_t nobs = r.u64();

  Dataset ds;
  ds.nobs = nobs;
  std::vector<std::string> attachments(nvar);
  for (std::size_t k = 0; k < nvar; ++k) {
    std::string name = r.str16();
    const std::uint8_t tag = r.u8();
    if (tag > static_cast<std::uint8_t>(StorageType::SStrL))
      fail("bad storage tag in " + path);
    attachments[k] = r.str16();
    ds.variables.emplace_back(std::move(name), static_cast<StorageType>(tag), nobs);
  }

  std::map<std::string, ValueLabelTable> tables;
  const std::size_t ntables = r.u32();
  for (std::size_t t = 0; t < ntables; ++t) {
    ValueLabelTable table;
    table.name = r.str16();
    const std::size_t entries = r.u32();
    for (std::size_t e = 0; e < entries; ++e) {
      const std::int32_t code = r.i32();
      table.labels[code] = r.str16();
    }
    tables[table.name] = std::move(table);
  }
  for (std::size_t k = 0; k < nvar; ++k) {
    if (attachments[k].empty()) continue;
    if (!tables.count(attachments[k]))
      fail("dangling label table reference '" + attachments[k] + "' in " + path);
    ds.variables[k].attach_label_table(attachments[k]);
  }

  for (std::size_t k = 0; k < nvar; ++k) {
    Variable& v = ds.variables[k];
    for (std::size_t i = 0; i < nobs; ++i) {
      switch (v.stype()) {
        case StorageType::SByte: v.set_integer(i, static_cast<std::int8_t>(r.u8())); break;
        case StorageType::SInt: v.set_integer(i, static_cast<std::int16_t>(r.u16())); break;
        case StorageType::SLong: v.set_integer(i, static_cast<std::int32_t>(r.u32())); break;
        case StorageType::SFloat: v.set_float(i, r.f32()); break;
        case StorageType::SDouble: v.set_double(i, r.f64()); break;
        case StorageType::SStr:
        case StorageType::SStrL: {
          const std::size_t len = r.u32();
          std::string bytes(len, '\0');
          if (len) r.bytes(bytes.data(), len);
          const bool binary = r.u8() != 0;
          v.set_str(i, std::move(bytes), binary);
          break;
        }
      }
    }
  }

  dataset_ = std::move(ds);
  for (auto& [name, table] : tables) label_tables_[name] = std::move(table);
  dataset_dirty_ = false;
}

}  // namespace statbridge
