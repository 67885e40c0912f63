#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "nsatc/error.hpp"
#include "nsatc/formats.hpp"

using namespace nsatc;
namespace fs = std::filesystem;

namespace {

std::string tmp(const std::string& name) {
  auto dir = fs::temp_directory_path() / "nsatc_test_formats";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

ErrorKind kind_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InputDomain;
}

LabeledTrace sample_trace() {
  auto [web, video] = default_profiles();
  return generate_mixed_trace({{web, 300}, {video, 300}}, 12);
}

}  // namespace

TEST_CASE("label run-length coding") {
  std::vector<std::uint8_t> l{0, 0, 0, 1, 1, 0};
  CHECK(encode_labels(l) == "0*3,1*2,0*1");
  CHECK(decode_labels(encode_labels(l)) == l);
  CHECK(decode_labels("").empty());
  CHECK_THROWS_AS(decode_labels("0*x"), Error);
}

TEST_CASE("record file round trip") {
  auto t = sample_trace();
  auto p = tmp("a.rec");
  write_record_file(t, p);
  auto back = read_record_file(p);
  CHECK(back == t);
  auto p2 = tmp("b.rec");
  write_record_file(back, p2);
  CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("record values survive text exactly") {
  auto t = sample_trace();
  t.records[0].epre_db = 0.1 + 0.2;
  t.records[0].snr_db = -1e-300;
  auto p = tmp("exact.rec");
  write_record_file(t, p);
  auto back = read_record_file(p);
  CHECK(back.records[0].epre_db == 0.1 + 0.2);
  CHECK(back.records[0].snr_db == -1e-300);
}

TEST_CASE("malformed record lines report the line number") {
  auto t = sample_trace();
  auto p = tmp("bad.rec");
  write_record_file(t, p);
  std::string text = slurp(p);
  // header is 6 lines; break the third record line
  std::size_t pos = 0;
  for (int i = 0; i < 8; ++i) pos = text.find('\n', pos) + 1;
  std::size_t end = text.find('\n', pos);
  text.replace(pos, end - pos, "0,0,LTE,PDSCH,abc");
  spit(p, text);
  std::string msg;
  CHECK(kind_of([&] { read_record_file(p); }, &msg) == ErrorKind::Format);
  CHECK(msg.find(":9:") != std::string::npos);
}

TEST_CASE("record reader refusals") {
  auto t = sample_trace();
  auto p = tmp("v.rec");
  write_record_file(t, p);
  std::string text = slurp(p);

  auto newer = text;
  newer.replace(0, newer.find('\n'), "#nsatc-records 2.0");
  spit(tmp("newer.rec"), newer);
  CHECK(kind_of([&] { read_record_file(tmp("newer.rec")); }) == ErrorKind::Format);

  auto minor = text;
  minor.replace(0, minor.find('\n'), "#nsatc-records 1.7");
  spit(tmp("minor.rec"), minor);
  CHECK(read_record_file(tmp("minor.rec")) == t);

  auto schema = text;
  auto at = schema.find("nsa-schema-1");
  schema.replace(at, 12, "nsa-schema-9");
  spit(tmp("schema.rec"), schema);
  CHECK(kind_of([&] { read_record_file(tmp("schema.rec")); }) == ErrorKind::Format);

  CHECK(kind_of([&] { read_record_file(tmp("missing.rec")); }) == ErrorKind::Io);
}

TEST_CASE("out of order records are a validation error naming both times") {
  auto t = sample_trace();
  std::swap(t.records[3], t.records[200]);
  auto p = tmp("order.rec");
  write_record_file(t, p);
  std::string msg;
  CHECK(kind_of([&] { read_record_file(p); }, &msg) == ErrorKind::Validation);
  CHECK(msg.find("ms") != std::string::npos);
}

TEST_CASE("sample matrix round trip") {
  auto t = sample_trace();
  ExtractOptions o;
  o.window_ms = 20;
  o.threshold = 50;
  auto f = extract(t, FeatureSchema::default_schema(), o);
  auto m = make_sample_matrix(f, FeatureSchema::default_schema(), o);
  CHECK(m.total_len == 71);
  CHECK(m.x.cols == 1420);
  CHECK(m.x.rows < f.kept.size());  // the straddling window is left out
  auto p = tmp("m.smp");
  write_sample_matrix(m, p);
  auto back = read_sample_matrix(p);
  CHECK(back.x == m.x);
  CHECK(back.labels == m.labels);
  CHECK(back.tb_total == m.tb_total);
  CHECK(back.window_start_frame == m.window_start_frame);
  CHECK(back.dropped == m.dropped);
  CHECK(back.threshold == m.threshold);
  CHECK(back.schema_fingerprint == FeatureSchema::default_schema().fingerprint());
  CHECK(slurp(p).find("#total_len 71\n") != std::string::npos);

  auto all = make_sample_matrix(f, FeatureSchema::default_schema(), o, true);
  CHECK(all.x.rows == f.kept.size());
}

TEST_CASE("empty sample matrix keeps a valid header") {
  auto t = sample_trace();
  ExtractOptions o;
  o.threshold = 1e9;
  auto f = extract(t, FeatureSchema::default_schema(), o);
  auto m = make_sample_matrix(f, FeatureSchema::default_schema(), o);
  CHECK(m.x.rows == 0);
  auto p = tmp("empty.smp");
  write_sample_matrix(m, p);
  auto back = read_sample_matrix(p);
  CHECK(back.x.rows == 0);
  CHECK(back.dims() == 710);
  CHECK(back.labels.empty());
}

TEST_CASE("sample matrix refusals") {
  auto t = sample_trace();
  ExtractOptions o;
  o.threshold = 0;
  auto m = make_sample_matrix(extract(t, FeatureSchema::default_schema(), o),
                              FeatureSchema::default_schema(), o);
  auto p = tmp("r.smp");
  write_sample_matrix(m, p);
  std::string text = slurp(p);

  auto newer = text;
  newer.replace(0, newer.find('\n'), "#nsatc-samples 3.0");
  spit(tmp("newer.smp"), newer);
  CHECK(kind_of([&] { read_sample_matrix(tmp("newer.smp")); }) == ErrorKind::Format);

  auto ragged = text;
  ragged.erase(ragged.rfind(','));  // drop the last value of the last row
  ragged += "\n";
  spit(tmp("ragged.smp"), ragged);
  std::string msg;
  CHECK(kind_of([&] { read_sample_matrix(tmp("ragged.smp")); }, &msg) == ErrorKind::Format);
}
