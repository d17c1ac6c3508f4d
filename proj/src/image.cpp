#include "idf/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "idf/errors.hpp"

namespace idf {

double ImageF::sample(double x, double y) const {
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    if (x0 > width - 2) x0 = width - 2;
    if (y0 > height - 2) y0 = height - 2;
    if (x0 < 0) x0 = 0;
    if (y0 < 0) y0 = 0;
    double fx = x - x0;
    double fy = y - y0;
    const double* p = &v[static_cast<size_t>(y0) * width + x0];
    return p[0] * (1 - fx) * (1 - fy) + p[1] * fx * (1 - fy) +
           p[width] * (1 - fx) * fy + p[width + 1] * fx * fy;
}

ImageF to_float(const EyeImage& img) {
    ImageF out(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) out.v[i] = img.pixels[i];
    return out;
}

EyeImage to_eight_bit(const ImageF& img) {
    EyeImage out;
    out.width = img.width;
    out.height = img.height;
    out.pixels.resize(img.v.size());
    for (size_t i = 0; i < img.v.size(); ++i) {
        double x = img.v[i];
        if (x < 0.0) x = 0.0;
        if (x > 255.0) x = 255.0;
        out.pixels[i] = static_cast<uint8_t>(std::nearbyint(x));  // FE_TONEAREST = half-even
    }
    return out;
}

void write_pgm(const std::string& path, const EyeImage& img) {
    if (img.empty()) throw std::invalid_argument("write_pgm: empty image");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_pgm: cannot open " + path);
    f << "P5\n" << img.width << " " << img.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!f) throw IoError("write_pgm: write failed for " + path);
}

namespace {
int next_pgm_token(std::istream& in) {
    // skips whitespace and '#' comment lines
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF) throw IoError("read_pgm: truncated header");
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}
}  // namespace

EyeImage read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_pgm: cannot open " + path);
    char m0 = static_cast<char>(f.get());
    char m1 = static_cast<char>(f.get());
    if (m0 != 'P' || m1 != '5') throw IoError("read_pgm: not a P5 graymap: " + path);
    EyeImage img;
    img.width = next_pgm_token(f);
    img.height = next_pgm_token(f);
    int maxval = next_pgm_token(f);
    if (maxval != 255) throw IoError("read_pgm: unsupported maxval in " + path);
    if (img.width <= 0 || img.height <= 0) throw IoError("read_pgm: bad dimensions in " + path);
    img.pixels.resize(static_cast<size_t>(img.width) * img.height);
    f.read(reinterpret_cast<char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
    if (f.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw IoError("read_pgm: truncated pixel data in " + path);
    return img;
}

}  // namespace idf
