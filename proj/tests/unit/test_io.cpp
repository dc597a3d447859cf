#include <cmath>
#include <limits>

#include "doctest.h"
#include "scdmi/csv.hpp"
#include "scdmi/error.hpp"
#include "scdmi/image.hpp"
#include "scdmi/synthetic.hpp"
#include "support.hpp"

using namespace scdmi;

namespace {

std::string ppm_bytes(const std::string& header, std::initializer_list<int> pixels) {
  std::string out = header;
  for (int p : pixels) out += static_cast<char>(static_cast<unsigned char>(p));
  return out;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("8-bit images survive an encode/decode round trip") {
  RasterImage img(3, 2);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    img.r[i] = static_cast<double>(i * 40) / 255.0;
    img.g[i] = static_cast<double>(255 - i * 17) / 255.0;
    img.b[i] = static_cast<double>(i * i) / 255.0;
  }
  const RasterImage back = decode_ppm(encode_ppm(img));
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.masked_count() == 6);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    CHECK(back.r[i] == img.r[i]);
    CHECK(back.g[i] == img.g[i]);
    CHECK(back.b[i] == img.b[i]);
  }
}

TEST_CASE("encoding clamps and rounds") {
  RasterImage img(2, 1);
  img.r = {-0.5, 1.5};
  img.g = {0.5, 1.0};
  img.b = {0.0, 0.999};
  const std::string bytes = encode_ppm(img);
  CHECK(bytes.rfind("P6\n2 1\n255\n", 0) == 0);
  const std::string data = bytes.substr(bytes.size() - 6);
  CHECK(static_cast<unsigned char>(data[0]) == 0);
  CHECK(static_cast<unsigned char>(data[1]) == 128);
  CHECK(static_cast<unsigned char>(data[3]) == 255);
  CHECK(static_cast<unsigned char>(data[5]) == 255);
}

TEST_CASE("header comments and small maxval") {
  const RasterImage img = decode_ppm(ppm_bytes("P6\n# made by hand\n1 1\n# scale\n15\n", {15, 5, 0}));
  CHECK(img.r[0] == 1.0);
  CHECK(img.g[0] == doctest::Approx(1.0 / 3.0));
  CHECK(img.b[0] == 0.0);
}

TEST_CASE("malformed streams raise IoError") {
  CHECK_THROWS_AS(decode_ppm("P3\n1 1\n255\n0 0 0\n"), IoError);
  CHECK_THROWS_AS(decode_ppm("P6\n1 1\n65535\n"), IoError);
  CHECK_THROWS_AS(decode_ppm("P6\n0 1\n255\n"), IoError);
  CHECK_THROWS_AS(decode_ppm("P6\nx 1\n255\n"), IoError);
  CHECK_THROWS_AS(decode_ppm(ppm_bytes("P6\n2 1\n255\n", {1, 2, 3})), IoError);
  CHECK_THROWS_AS(decode_ppm(""), IoError);
}

TEST_CASE("file round trip and missing files") {
  const auto dir = test::scratch_dir("io_files");
  const RasterImage img = decode_ppm(encode_ppm(random_noise_image(4, 5, 4)));
  write_ppm(dir / "n.ppm", img);
  CHECK(read_ppm(dir / "n.ppm") == img);
  CHECK_THROWS_AS(read_ppm(dir / "absent.ppm"), IoError);
  write_text_file(dir / "junk.ppm", "not an image");
  CHECK_THROWS_AS(read_ppm(dir / "junk.ppm"), IoError);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.1) == "-0.1");
  for (double v : {1.0 / 3.0, 6.02214076e23, -2.5e-300, std::numeric_limits<double>::min()}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("split_csv_line keeps empty fields") {
  CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_line("a,,") == std::vector<std::string>{"a", "", ""});
  CHECK(split_csv_line("") == std::vector<std::string>{""});
}

TEST_CASE("write_text_file creates parent directories") {
  const auto dir = test::scratch_dir("io_text");
  const auto path = dir / "x" / "y" / "z.txt";
  write_text_file(path, "hello\n");
  CHECK(read_text_file(path) == "hello\n");
  CHECK_THROWS_AS(read_text_file(dir / "none.txt"), IoError);
}

TEST_CASE("image construction checks") {
  CHECK_THROWS_AS(RasterImage(0, 3), InvalidSpec);
  RasterImage img(2, 2);
  CHECK(img.masked_count() == 4);
  img.g.pop_back();
  CHECK_THROWS_AS(img.check_consistent(), InvalidSpec);
}

}  // TEST_SUITE
