#include "nsatc/formats.hpp"

#include <algorithm>
#include <sstream>

#include "nsatc/error.hpp"
#include "nsatc/text.hpp"

namespace nsatc {

namespace {

constexpr std::string_view kRecordMagic = "#nsatc-records";
constexpr std::string_view kSampleMagic = "#nsatc-samples";

std::string record_columns() {
  std::string s = "frame,subframe,cell_slot,channel";
  for (int f = 0; f < kRecordFields; ++f) s += "," + std::string(to_string(RecordField(f)));
  return s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  return in;
}

bool read_line(std::istream& in, std::string& line, std::size_t& line_no) {
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// "#key value" header lines.
struct Header {
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(std::string_view key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
};

void check_version(const std::string& path, std::string_view magic, const std::string& line,
                   int major_supported) {
  if (line.rfind(magic, 0) != 0)
    fail(ErrorKind::Format, path + ":1: missing '" + std::string(magic) + "' header");
  std::string version = line.size() > magic.size() + 1 ? line.substr(magic.size() + 1) : "";
  auto parts = text::split(version, '.');
  auto major = parts.size() == 2 ? text::parse_int<int>(parts[0]) : std::nullopt;
  if (!major) fail(ErrorKind::Format, path + ":1: malformed format version '" + version + "'");
  if (*major > major_supported)
    fail(ErrorKind::Format, path + ": format version " + version + " is newer than this reader (" +
                                std::to_string(major_supported) + ".x)");
}

void check_schema(const std::string& path, const Header& h, const FeatureSchema& schema) {
  const std::string* v = h.find("schema");
  if (!v) fail(ErrorKind::Format, path + ": header lacks a schema version");
  if (*v != schema.version())
    fail(ErrorKind::Format, path + ": schema version '" + *v + "' does not match '" +
                                std::string(schema.version()) + "'");
}

}  // namespace

std::string encode_labels(const std::vector<std::uint8_t>& labels) {
  std::string out;
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    if (!out.empty()) out += ',';
    out += std::to_string(labels[i]) + "*" + std::to_string(j - i);
    i = j;
  }
  return out;
}

std::vector<std::uint8_t> decode_labels(const std::string& text) {
  std::vector<std::uint8_t> labels;
  if (text.empty()) return labels;
  for (auto run : text::split(text, ',')) {
    auto parts = text::split(run, '*');
    auto label = parts.size() == 2 ? text::parse_int<unsigned>(parts[0]) : std::nullopt;
    auto count = parts.size() == 2 ? text::parse_int<std::size_t>(parts[1]) : std::nullopt;
    if (!label || !count || *label > 1)
      fail(ErrorKind::Format, "malformed label run '" + std::string(run) + "'");
    labels.insert(labels.end(), *count, static_cast<std::uint8_t>(*label));
  }
  return labels;
}

void write_record_file(const LabeledTrace& trace, const std::string& path,
                       const FeatureSchema& schema) {
  auto out = open_out(path);
  out << kRecordMagic << ' ' << kRecordFormatMajor << ".0\n";
  out << "#schema " << schema.version() << '\n';
  out << "#duration_ms " << trace.duration_ms << '\n';
  out << "#seed " << trace.seed << '\n';
  out << "#labels " << encode_labels(trace.labels) << '\n';
  out << record_columns() << '\n';
  std::string line;
  for (const auto& r : trace.records) {
    line.clear();
    line += std::to_string(r.time.frame);
    line += ',';
    line += std::to_string(r.time.subframe);
    line += ',';
    line += to_string(r.time.slot);
    line += ',';
    line += to_string(r.channel);
    for (int f = 0; f < kRecordFields; ++f) {
      line += ',';
      auto field = RecordField(f);
      if (field == RecordField::EpreDb || field == RecordField::SnrDb)
        line += text::format_double(r.value(field));
      else
        line += std::to_string(static_cast<std::uint64_t>(r.value(field)));
    }
    line += '\n';
    out << line;
  }
  close_out(out, path);
}

RecordFileReader::RecordFileReader(const std::string& path, const FeatureSchema& schema)
    : path_(path), in_(open_in(path)) {
  std::string line;
  if (!read_line(in_, line, line_no_)) error("empty file");
  check_version(path_, kRecordMagic, line, kRecordFormatMajor);
  Header h;
  while (read_line(in_, line, line_no_)) {
    if (line.empty()) continue;
    if (line[0] != '#') {
      if (line != record_columns()) error("unexpected column header");
      break;
    }
    auto sp = line.find(' ');
    h.entries.emplace_back(line.substr(1, sp == std::string::npos ? std::string::npos : sp - 1),
                           sp == std::string::npos ? "" : line.substr(sp + 1));
  }
  check_schema(path_, h, schema);
  const std::string* duration = h.find("duration_ms");
  auto d = duration ? text::parse_int<std::uint64_t>(*duration) : std::nullopt;
  if (!d || *d % 10 != 0) error("missing or malformed duration_ms");
  duration_ms_ = *d;
  if (const std::string* s = h.find("seed")) seed_ = text::parse_int<std::uint64_t>(*s).value_or(0);
  const std::string* labels = h.find("labels");
  if (!labels) error("missing labels");
  try {
    labels_ = decode_labels(*labels);
  } catch (const Error& e) {
    error(e.what());
  }
  if (labels_.size() != duration_ms_ / 10) error("label count does not match duration");
}

void RecordFileReader::error(const std::string& what) const {
  fail(ErrorKind::Format, path_ + ":" + std::to_string(line_no_) + ": " + what);
}

ChannelRecord RecordFileReader::parse(const std::string& line) const {
  auto cols = text::split(line, ',');
  if (cols.size() != 4 + kRecordFields)
    error("expected " + std::to_string(4 + kRecordFields) + " fields, found " +
          std::to_string(cols.size()));
  ChannelRecord r;
  auto frame = text::parse_int<std::uint32_t>(cols[0]);
  auto subframe = text::parse_int<unsigned>(cols[1]);
  auto slot = parse_cell_slot(cols[2]);
  auto channel = parse_channel(cols[3]);
  if (!frame || !subframe || *subframe >= kSubframesPerFrame) error("bad frame/subframe");
  if (!slot) error("unknown cell slot '" + std::string(cols[2]) + "'");
  if (!channel) error("unknown channel '" + std::string(cols[3]) + "'");
  r.time = {*frame, static_cast<std::uint8_t>(*subframe), *slot};
  r.channel = *channel;
  std::uint32_t* ints[] = {&r.tb_len,    &r.prb_count,         &r.prb_start,   &r.mcs,
                           nullptr,      nullptr,              &r.harq_ack,    &r.cce_index,
                           &r.aggregation_level, &r.format_type, &r.srs_bw_rb, &r.ack_nack};
  for (int f = 0; f < kRecordFields; ++f) {
    auto col = cols[4 + f];
    if (ints[f]) {
      auto v = text::parse_int<std::uint32_t>(col);
      if (!v) error("malformed " + std::string(to_string(RecordField(f))) + " '" +
                    std::string(col) + "'");
      *ints[f] = *v;
    } else {
      auto v = text::parse_double(col);
      if (!v) error("malformed " + std::string(to_string(RecordField(f))) + " '" +
                    std::string(col) + "'");
      (RecordField(f) == RecordField::EpreDb ? r.epre_db : r.snr_db) = *v;
    }
  }
  return r;
}

std::optional<ChannelRecord> RecordFileReader::next() {
  std::string line;
  while (read_line(in_, line, line_no_)) {
    if (line.empty()) continue;
    ChannelRecord r = parse(line);
    try {
      validate_record(r);
    } catch (const Error& e) {
      fail(ErrorKind::Validation, path_ + ":" + std::to_string(line_no_) + ": " + e.what());
    }
    if (r.time.frame >= labels_.size())
      fail(ErrorKind::Validation, path_ + ":" + std::to_string(line_no_) +
                                      ": record beyond the declared duration");
    if (previous_ && canonical_less(r, *previous_))
      fail(ErrorKind::Validation,
           path_ + ":" + std::to_string(line_no_) + ": record at " +
               text::format_double(r.time.start_ms()) + " ms follows one at " +
               text::format_double(previous_->time.start_ms()) + " ms (out of order)");
    previous_ = r;
    return r;
  }
  return std::nullopt;
}

LabeledTrace read_record_file(const std::string& path, const FeatureSchema& schema) {
  RecordFileReader reader(path, schema);
  LabeledTrace t;
  t.duration_ms = reader.duration_ms();
  t.seed = reader.seed();
  t.labels = reader.labels();
  while (auto r = reader.next()) t.records.push_back(*r);
  return t;
}

SampleMatrix make_sample_matrix(const FilterResult& filtered, const FeatureSchema& schema,
                                const ExtractOptions& options, bool keep_mixed) {
  SampleMatrix m;
  m.schema_version = std::string(schema.version());
  m.schema_fingerprint = schema.fingerprint();
  m.window_ms = options.window_ms;
  m.threshold = options.threshold;
  m.stride_frames = options.stride_frames;
  m.total_len = schema.total_len();
  m.dropped = filtered.dropped;
  const std::size_t dims = m.dims();
  std::size_t rows = 0;
  for (const auto& s : filtered.kept) rows += (keep_mixed || s.uniform_label) ? 1 : 0;
  m.x = Matrix(rows, dims);
  std::size_t i = 0;
  for (const auto& s : filtered.kept) {
    if (!keep_mixed && !s.uniform_label) continue;
    require(s.vector.size() == dims, ErrorKind::Validation, "sample length does not match schema");
    std::copy(s.vector.begin(), s.vector.end(), m.x.row(i).begin());
    m.labels.push_back(s.label);
    m.window_start_frame.push_back(s.window_start_frame);
    m.tb_total.push_back(s.tb_total);
    ++i;
  }
  return m;
}

void write_sample_matrix(const SampleMatrix& m, const std::string& path,
                         const FeatureSchema& schema) {
  auto out = open_out(path);
  out << kSampleMagic << ' ' << kSampleFormatMajor << ".0\n";
  out << "#schema " << m.schema_version << '\n';
  out << "#schema_fingerprint " << text::hex64(m.schema_fingerprint) << '\n';
  out << "#window_ms " << m.window_ms << '\n';
  out << "#w " << m.frames_per_window() << '\n';
  out << "#threshold " << text::format_double(m.threshold) << '\n';
  out << "#stride_frames " << m.stride_frames << '\n';
  out << "#total_len " << m.total_len << '\n';
  out << "#dims " << m.dims() << '\n';
  out << "#dropped " << m.dropped << '\n';
  std::string line = "window_start_frame,label,tb_total";
  const bool named = schema.version() == m.schema_version && schema.total_len() == m.total_len;
  for (std::size_t j = 0; j < m.dims(); ++j)
    line += "," + (named ? schema.origin(j).name() : "f" + std::to_string(j));
  out << line << '\n';
  for (std::size_t i = 0; i < m.x.rows; ++i) {
    line = std::to_string(m.window_start_frame[i]) + "," + std::to_string(m.labels[i]) + "," +
           std::to_string(m.tb_total[i]);
    for (double v : m.x.row(i)) {
      line += ',';
      line += text::format_double(v);
    }
    line += '\n';
    out << line;
  }
  close_out(out, path);
}

SampleMatrix read_sample_matrix(const std::string& path) {
  auto in = open_in(path);
  std::size_t line_no = 0;
  std::string line;
  auto error = [&](const std::string& what) {
    fail(ErrorKind::Format, path + ":" + std::to_string(line_no) + ": " + what);
  };
  if (!read_line(in, line, line_no)) error("empty file");
  check_version(path, kSampleMagic, line, kSampleFormatMajor);

  Header h;
  while (read_line(in, line, line_no) && !line.empty() && line[0] == '#') {
    auto sp = line.find(' ');
    if (sp == std::string::npos) error("malformed header line");
    h.entries.emplace_back(line.substr(1, sp - 1), line.substr(sp + 1));
  }
  auto get_uint = [&](std::string_view key) -> std::uint64_t {
    const std::string* v = h.find(key);
    auto n = v ? text::parse_int<std::uint64_t>(*v) : std::nullopt;
    if (!n) error("header lacks a valid '" + std::string(key) + "'");
    return *n;
  };

  SampleMatrix m;
  if (const std::string* s = h.find("schema")) m.schema_version = *s;
  else error("header lacks a schema version");
  const std::string* fp = h.find("schema_fingerprint");
  auto fpv = fp ? text::parse_int<std::uint64_t>(*fp, 16) : std::nullopt;
  if (!fpv) error("header lacks a valid schema_fingerprint");
  m.schema_fingerprint = *fpv;
  m.window_ms = static_cast<std::uint32_t>(get_uint("window_ms"));
  m.stride_frames = static_cast<std::uint32_t>(get_uint("stride_frames"));
  m.total_len = get_uint("total_len");
  m.dropped = get_uint("dropped");
  const std::string* th = h.find("threshold");
  auto thv = th ? text::parse_double(*th) : std::nullopt;
  if (!thv) error("header lacks a valid threshold");
  m.threshold = *thv;
  if (m.window_ms == 0 || m.window_ms % 10 != 0) error("window_ms is not a multiple of 10");
  if (get_uint("w") != m.frames_per_window()) error("w does not match window_ms");
  const std::size_t dims = get_uint("dims");
  if (dims != m.dims()) error("dims does not match window_ms * total_len");

  // `line` now holds the column header.
  if (text::split(line, ',').size() != dims + 3) error("column header width does not match dims");

  std::vector<double> data;
  while (read_line(in, line, line_no)) {
    if (line.empty()) continue;
    auto cols = text::split(line, ',');
    if (cols.size() != dims + 3)
      error("expected " + std::to_string(dims + 3) + " fields, found " +
            std::to_string(cols.size()));
    auto start = text::parse_int<std::uint32_t>(cols[0]);
    auto label = text::parse_int<unsigned>(cols[1]);
    auto tb = text::parse_int<std::uint64_t>(cols[2]);
    if (!start || !label || *label > 1 || !tb) error("malformed sample prefix");
    m.window_start_frame.push_back(*start);
    m.labels.push_back(static_cast<std::uint8_t>(*label));
    m.tb_total.push_back(*tb);
    for (std::size_t j = 0; j < dims; ++j) {
      auto v = text::parse_double(cols[3 + j]);
      if (!v) error("malformed feature value '" + std::string(cols[3 + j]) + "'");
      data.push_back(*v);
    }
  }
  m.x.rows = m.labels.size();
  m.x.cols = dims;
  m.x.data = std::move(data);
  return m;
}

}  // namespace nsatc
