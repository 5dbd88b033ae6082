#include "varden/image_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace varden {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Cursor {
    const std::string& buf;
    std::size_t pos = 0;
    bool pgm_comments = false;

    bool eof() const { return pos >= buf.size(); }

    void skip_ws() {
        while (!eof()) {
            const char c = buf[pos];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else if (pgm_comments && c == '#') {
                while (!eof() && buf[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    std::string token(const char* what) {
        skip_ws();
        if (eof()) throw ParseError(std::string("expected ") + what + ", got end of data", pos);
        const std::size_t start = pos;
        while (!eof() && !std::isspace(static_cast<unsigned char>(buf[pos])) &&
               !(pgm_comments && buf[pos] == '#'))
            ++pos;
        return buf.substr(start, pos - start);
    }

    long integer(const char* what) {
        skip_ws();
        const std::size_t at = pos;
        const std::string tok = token(what);
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(tok, &used);
        } catch (const std::exception&) {
            throw ParseError(std::string("expected ") + what + ", got '" + tok + "'", at);
        }
        if (used != tok.size())
            throw ParseError(std::string("expected ") + what + ", got '" + tok + "'", at);
        return v;
    }

    double real(const char* what) {
        skip_ws();
        const std::size_t at = pos;
        const std::string tok = token(what);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ParseError(std::string("expected ") + what + ", got '" + tok + "'", at);
        }
        if (used != tok.size())
            throw ParseError(std::string("expected ") + what + ", got '" + tok + "'", at);
        return v;
    }
};

Image read_pgm(const std::string& buf, bool binary) {
    Cursor c{buf};
    c.pos = 2;  // past the magic
    c.pgm_comments = true;
    const long width = c.integer("width");
    const long height = c.integer("height");
    const long maxval = c.integer("maxval");
    if (width <= 0 || height <= 0)
        throw ParseError("image dimensions must be positive", 2);
    if (maxval < 1 || maxval > 255)
        throw ParseError("only 8-bit data supported (maxval in [1,255])", c.pos);
    Image im(static_cast<int>(height), static_cast<int>(width));
    if (binary) {
        // exactly one whitespace byte separates the header from the payload
        if (c.eof() || !std::isspace(static_cast<unsigned char>(buf[c.pos])))
            throw ParseError("expected single whitespace before binary payload", c.pos);
        ++c.pos;
        if (buf.size() - c.pos < im.size())
            throw ParseError("truncated binary payload", buf.size());
        for (std::size_t i = 0; i < im.size(); ++i) {
            const unsigned char b = static_cast<unsigned char>(buf[c.pos + i]);
            if (b > maxval)
                throw ParseError("sample exceeds declared maxval", c.pos + i);
            im.data[i] = static_cast<double>(b);
        }
    } else {
        for (std::size_t i = 0; i < im.size(); ++i) {
            const std::size_t at = c.pos;
            const long s = c.integer("sample");
            if (s < 0 || s > maxval)
                throw ParseError("sample outside [0, maxval]", at);
            im.data[i] = static_cast<double>(s);
        }
    }
    return im;
}

Image read_float_text(const std::string& buf) {
    Cursor c{buf};
    const long rows = c.integer("row count");
    const long cols = c.integer("column count");
    if (rows <= 0 || cols <= 0) throw ParseError("image dimensions must be positive", 0);
    Image im(static_cast<int>(rows), static_cast<int>(cols));
    for (std::size_t i = 0; i < im.size(); ++i) im.data[i] = c.real("pixel value");
    return im;
}

}  // namespace

Image image_read(const std::string& path) {
    const std::string buf = slurp(path);
    if (buf.size() >= 2 && buf[0] == 'P' && (buf[1] == '2' || buf[1] == '5'))
        return read_pgm(buf, buf[1] == '5');
    return read_float_text(buf);
}

void image_write_float(const std::string& path, const Image& im) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << im.rows << ' ' << im.cols << '\n';
    char tmp[64];
    for (int i = 0; i < im.rows; ++i) {
        for (int j = 0; j < im.cols; ++j) {
            std::snprintf(tmp, sizeof tmp, "%.17g", im.at(i, j));
            out << tmp << (j + 1 == im.cols ? '\n' : ' ');
        }
    }
    if (!out) throw Error("write failed: " + path);
}

void image_write_pgm(const std::string& path, const Image& im, int maxval, bool binary) {
    if (maxval < 1 || maxval > 255)
        throw Error("image_write_pgm: maxval must be in [1,255]");
    require_finite(im, "image_write_pgm");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << (binary ? "P5" : "P2") << '\n'
        << im.cols << ' ' << im.rows << '\n'
        << maxval << '\n';
    for (std::size_t i = 0; i < im.size(); ++i) {
        // nearbyint under the default rounding mode rounds half to even
        double v = std::nearbyint(im.data[i]);
        v = std::min(std::max(v, 0.0), static_cast<double>(maxval));
        const int s = static_cast<int>(v);
        if (binary)
            out.put(static_cast<char>(static_cast<unsigned char>(s)));
        else
            out << s << ((i + 1) % static_cast<std::size_t>(im.cols) == 0 ? '\n' : ' ');
    }
    if (!out) throw Error("write failed: " + path);
}

void sidecar_write(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
    if (!out) throw Error("write failed: " + path);
}

std::map<std::string, std::string> sidecar_read(const std::string& path) {
    const std::string buf = slurp(path);
    std::map<std::string, std::string> kv;
    std::size_t line_start = 0;
    while (line_start < buf.size()) {
        std::size_t line_end = buf.find('\n', line_start);
        if (line_end == std::string::npos) line_end = buf.size();
        const std::string line = buf.substr(line_start, line_end - line_start);
        if (!line.empty() && line[0] != '#') {
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ParseError("expected key=value", line_start);
            kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
        line_start = line_end + 1;
    }
    return kv;
}

}  // namespace varden
