#include <fstream>

#include "doctest.h"
#include "nun/io.hpp"
#include "support.hpp"

using namespace nun;

TEST_CASE("png round trip at 8-bit precision") {
    const auto dir = support::scratch_dir("io_png");
    std::mt19937_64 rng(14);
    Raster x = support::random_raster(rng, 5, 7, 3);
    for (double& v : x.values()) v = io::quantize(v) / 255.0;
    io::write_png(dir / "x.png", x);
    CHECK(io::read_png(dir / "x.png") == x);

    const MaskMap m = support::random_binary_mask(rng, 5, 7);
    io::write_mask_png(dir / "m.png", m);
    CHECK(io::read_mask_png(dir / "m.png") == m);
    CHECK(io::read_png(dir / "m.png").channels() == 1);
}

TEST_CASE("raw format layout") {
    const auto dir = support::scratch_dir("io_raw");
    const Raster r(2, 3, 1, std::vector<double>{0.0, 0.5, 1.0, 0.25, 0.75, 2.0});
    io::write_raw(dir / "r.nunr", r);
    const std::string bytes = support::read_bytes(dir / "r.nunr");
    REQUIRE(bytes.size() == 16 + 6 * 4);
    CHECK(bytes.substr(0, 4) == "NUNR");
    CHECK(static_cast<unsigned char>(bytes[4]) == 2);
    CHECK(static_cast<unsigned char>(bytes[8]) == 3);
    CHECK(static_cast<unsigned char>(bytes[12]) == 1);
    CHECK(io::read_raw(dir / "r.nunr") == r);
}

TEST_CASE("io errors") {
    const auto dir = support::scratch_dir("io_err");
    CHECK_THROWS_AS(io::read_png(dir / "missing.png"), io::IoError);
    {
        std::ofstream(dir / "bad.nunr") << "XXXX";
    }
    CHECK_THROWS_AS(io::read_raw(dir / "bad.nunr"), io::IoError);
    CHECK(io::quantize(-0.2) == 0);
    CHECK(io::quantize(1.7) == 255);
    CHECK(io::quantize(0.5) == 128);
}
