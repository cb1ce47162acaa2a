// SPDX-License-Identifier: Apache-2.0

#include "ghostsim/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <system_error>

namespace ghostsim {

std::string format_double(double v) {
    char buf[64];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw NumericError("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

namespace {

double parse_tagged(const std::string& text, const std::string& tag, double fallback) {
    const size_t pos = text.find(tag);
    if (pos == std::string::npos) return fallback;
    const char* begin = text.data() + pos + tag.size();
    const char* end = text.data() + text.size();
    double value = fallback;
    std::from_chars(begin, end, value);
    return value;
}

} // namespace

void write_pgm16(const Image& img, const std::string& path, double lo, double hi) {
    if (img.empty()) throw InvalidArgument("write_pgm16: empty image");
    if (lo == hi) {
        const auto [mn, mx] = std::minmax_element(img.data().begin(), img.data().end());
        lo = *mn;
        hi = *mx;
        if (lo == hi) {
            // Constant image: pick a window that contains the value and is
            // [0,1] whenever the value lies in it.
            lo = std::min(lo, 0.0);
            hi = std::max(hi, 1.0);
        }
    }
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw InvalidArgument("write_pgm16: invalid scale window");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_pgm16: cannot open '" + path + "' for writing");
    out << "P5\n# ghostsim lo=" << format_double(lo) << " hi=" << format_double(hi)
        << " pitch=" << format_double(img.pitch_mm()) << "\n"
        << img.cols() << ' ' << img.rows() << "\n65535\n";

    const double scale = 65535.0 / (hi - lo);
    std::vector<unsigned char> raster(img.size() * 2);
    for (size_t i = 0; i < img.size(); ++i) {
        const double x = (img.data()[i] - lo) * scale;
        const uint16_t q =
            static_cast<uint16_t>(std::clamp(std::llround(x), 0ll, 65535ll));
        raster[2 * i] = static_cast<unsigned char>(q >> 8); // big-endian per PGM
        raster[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raster.data()),
              static_cast<std::streamsize>(raster.size()));
    if (!out) throw IoError("write_pgm16: write to '" + path + "' failed");
}

PgmImage read_pgm16(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_pgm16: cannot open '" + path + "'");
    std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    size_t pos = 0;
    std::string comments;
    const auto skip_space = [&](bool single) {
        // Advance over whitespace (and comments unless `single`), which PGM
        // allows between any two header tokens.
        if (single) {
            if (pos < blob.size() && std::isspace(static_cast<unsigned char>(blob[pos]))) ++pos;
            return;
        }
        while (pos < blob.size()) {
            const char c = blob[pos];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else if (c == '#') {
                const size_t eol = blob.find('\n', pos);
                const size_t stop = eol == std::string::npos ? blob.size() : eol;
                comments.append(blob, pos, stop - pos);
                comments.push_back('\n');
                pos = stop;
            } else {
                break;
            }
        }
    };
    const auto next_int = [&]() -> long {
        skip_space(false);
        long value = 0;
        const std::from_chars_result res =
            std::from_chars(blob.data() + pos, blob.data() + blob.size(), value);
        if (res.ec != std::errc())
            throw IoError("read_pgm16: malformed header in '" + path + "'");
        pos = static_cast<size_t>(res.ptr - blob.data());
        return value;
    };

    if (blob.size() < 2 || blob[0] != 'P' || blob[1] != '5')
        throw IoError("read_pgm16: '" + path + "' is not a binary PGM (P5)");
    pos = 2;
    const long cols = next_int();
    const long rows = next_int();
    const long maxval = next_int();
    skip_space(true);
    if (cols < 2 || rows < 2)
        throw IoError("read_pgm16: '" + path + "' image is smaller than 2x2");
    if (maxval != 65535)
        throw IoError("read_pgm16: '" + path + "' is not 16-bit (maxval " +
                      std::to_string(maxval) + ")");
    const size_t count = static_cast<size_t>(rows) * static_cast<size_t>(cols);
    if (blob.size() - pos < 2 * count)
        throw IoError("read_pgm16: '" + path + "' raster is truncated");

    PgmImage out;
    out.lo = parse_tagged(comments, "lo=", 0.0);
    out.hi = parse_tagged(comments, "hi=", 1.0);
    if (!(out.hi > out.lo))
        throw IoError("read_pgm16: '" + path + "' has an invalid scale window");
    const double pitch = parse_tagged(comments, "pitch=", 0.0);

    out.image = Image(static_cast<int>(rows), static_cast<int>(cols),
                      pitch > 0.0 ? pitch : 0.0);
    const double scale = (out.hi - out.lo) / 65535.0;
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(blob.data() + pos);
    for (size_t i = 0; i < count; ++i) {
        const uint16_t q = static_cast<uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
        out.image.data()[i] = out.lo + q * scale;
    }
    return out;
}

const char* const kSweepCsvHeader =
    "sweep_name,varied_param,value,family,recon,noise,seed,snr_sim,snr_theory,"
    "rmse0,rmsep,rmsem";

std::string sweep_csv_string(const std::vector<SnrRecord>& records) {
    std::string out = kSweepCsvHeader;
    out.push_back('\n');
    for (const SnrRecord& r : records) {
        out += r.sweep_name;
        out.push_back(',');
        out += r.varied_param;
        out.push_back(',');
        out += format_double(r.value);
        out.push_back(',');
        out += r.family;
        out.push_back(',');
        out += r.recon;
        out.push_back(',');
        out += r.noise;
        out.push_back(',');
        out += std::to_string(r.seed);
        out.push_back(',');
        out += format_double(r.snr_sim);
        out.push_back(',');
        out += format_double(r.snr_theory);
        out.push_back(',');
        out += format_double(r.rmse0);
        out.push_back(',');
        out += format_double(r.rmsep);
        out.push_back(',');
        out += format_double(r.rmsem);
        out.push_back('\n');
    }
    return out;
}

void write_sweep_csv(const std::vector<SnrRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_sweep_csv: cannot open '" + path + "' for writing");
    const std::string text = sweep_csv_string(records);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write_sweep_csv: write to '" + path + "' failed");
}

} // namespace ghostsim
