#include "sfg/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <Eigen/SVD>

namespace sfg::io {

namespace {

constexpr float kFloMagic = 202021.25f;
constexpr int kMaxRasterDim = 99999;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw ParseError(path.string() + ": " + what);
}

[[noreturn]] void fail_at_byte(const std::filesystem::path& path, std::size_t offset,
                               const std::string& what) {
    fail(path, what + " (byte " + std::to_string(offset) + ")");
}

[[noreturn]] void fail_at_line(const std::filesystem::path& path, int line,
                               const std::string& what) {
    fail(path, what + " (line " + std::to_string(line) + ")");
}

/// Cursor over an in-memory file image with byte-position error reporting.
class ByteReader {
public:
    ByteReader(std::string bytes, const std::filesystem::path& path)
        : bytes_(std::move(bytes)), path_(path) {}

    std::size_t offset() const { return offset_; }
    std::size_t remaining() const { return bytes_.size() - offset_; }

    void read(void* dst, std::size_t n, const char* what) {
        if (remaining() < n)
            fail_at_byte(path_, offset_, std::string("truncated ") + what);
        std::memcpy(dst, bytes_.data() + offset_, n);
        offset_ += n;
    }

    std::uint32_t read_u32_le(const char* what) {
        std::uint8_t b[4];
        read(b, 4, what);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    float read_f32_le(const char* what) { return std::bit_cast<float>(read_u32_le(what)); }

    void expect_exhausted(const char* what) {
        if (remaining() != 0)
            fail_at_byte(path_, offset_, std::string("trailing bytes after ") + what);
    }

    /// Next whitespace-delimited token, skipping '#' comments to end of line.
    std::string token(const char* what) {
        while (offset_ < bytes_.size()) {
            const char c = bytes_[offset_];
            if (c == '#') {
                while (offset_ < bytes_.size() && bytes_[offset_] != '\n') ++offset_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++offset_;
            } else {
                break;
            }
        }
        if (offset_ >= bytes_.size())
            fail_at_byte(path_, offset_, std::string("missing ") + what);
        const std::size_t start = offset_;
        while (offset_ < bytes_.size() &&
               !std::isspace(static_cast<unsigned char>(bytes_[offset_])))
            ++offset_;
        return bytes_.substr(start, offset_ - start);
    }

    int token_int(const char* what, int min_value, int max_value) {
        const std::size_t at = offset_;
        const std::string tok = token(what);
        int value = 0;
        try {
            std::size_t used = 0;
            value = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            fail_at_byte(path_, at, std::string("bad integer for ") + what + ": '" + tok + "'");
        }
        if (value < min_value || value > max_value)
            fail_at_byte(path_, at, std::string(what) + " out of range: " + tok);
        return value;
    }

    double token_double(const char* what) {
        const std::size_t at = offset_;
        const std::string tok = token(what);
        try {
            std::size_t used = 0;
            const double value = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return value;
        } catch (const std::exception&) {
            fail_at_byte(path_, at, std::string("bad number for ") + what + ": '" + tok + "'");
        }
    }

    /// Consume exactly one whitespace byte (PNM header/payload separator).
    void expect_single_whitespace(const char* what) {
        if (remaining() < 1 || !std::isspace(static_cast<unsigned char>(bytes_[offset_])))
            fail_at_byte(path_, offset_, std::string("missing separator before ") + what);
        ++offset_;
    }

private:
    std::string bytes_;
    std::filesystem::path path_;
    std::size_t offset_ = 0;
};

void append_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void append_f32_le(std::string& out, float v) { append_u32_le(out, std::bit_cast<std::uint32_t>(v)); }

void check_raster_dims(int width, int height, const std::filesystem::path& path) {
    if (width < 1 || height < 1 || width > kMaxRasterDim || height > kMaxRasterDim)
        throw IoError(path.string() + ": raster dimensions out of range " +
                      std::to_string(width) + "x" + std::to_string(height));
}

char* format_g17(char* buf, std::size_t n, double v) {
    std::snprintf(buf, n, "%.17g", v);
    return buf;
}

/// Deterministic sign: the quaternion with non-negative w (largest-index
/// nonzero component positive on the w == 0 boundary).
Eigen::Quaterniond canonical_quaternion(const Eigen::Matrix3d& rotation) {
    Eigen::Quaterniond q(rotation);
    q.normalize();
    const double comps[4] = {q.w(), q.z(), q.y(), q.x()};
    for (double c : comps) {
        if (c > 0.0) break;
        if (c < 0.0) {
            q.coeffs() = -q.coeffs();
            break;
        }
    }
    return q;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("read failed for " + path.string());
    return std::move(buf).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out.good()) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

FlowField read_flo(const std::filesystem::path& path) {
    ByteReader r(read_file(path), path);
    const float magic = r.read_f32_le("magic");
    if (magic != kFloMagic)
        fail_at_byte(path, 0, "bad magic, expected 202021.25");
    const auto width = static_cast<std::int32_t>(r.read_u32_le("width"));
    const auto height = static_cast<std::int32_t>(r.read_u32_le("height"));
    if (width < 1 || height < 1 || width > kMaxRasterDim || height > kMaxRasterDim)
        fail_at_byte(path, 4, "dimensions out of range " + std::to_string(width) + "x" +
                                  std::to_string(height));

    FlowField flow = FlowField::zeros(width, height);
    for (std::size_t i = 0; i < flow.values.size(); ++i) {
        const float u = r.read_f32_le("flow payload");
        const float v = r.read_f32_le("flow payload");
        flow.values[i] = Eigen::Vector2d(u, v);
    }
    r.expect_exhausted("flow payload");
    return flow;
}

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
    check_raster_dims(flow.width, flow.height, path);
    std::string out;
    out.reserve(12 + flow.values.size() * 8);
    append_f32_le(out, kFloMagic);
    append_u32_le(out, static_cast<std::uint32_t>(flow.width));
    append_u32_le(out, static_cast<std::uint32_t>(flow.height));
    for (const Eigen::Vector2d& v : flow.values) {
        if (!v.allFinite()) throw IoError(path.string() + ": non-finite flow value");
        append_f32_le(out, static_cast<float>(v.x()));
        append_f32_le(out, static_cast<float>(v.y()));
    }
    write_file_atomic(path, out);
}

DepthMap read_pfm(const std::filesystem::path& path) {
    ByteReader r(read_file(path), path);
    const std::string magic = r.token("PFM magic");
    if (magic == "PF") fail_at_byte(path, 0, "unsupported format: color PFM");
    if (magic != "Pf") fail_at_byte(path, 0, "bad magic, expected Pf");
    const int width = r.token_int("width", 1, kMaxRasterDim);
    const int height = r.token_int("height", 1, kMaxRasterDim);
    const double scale = r.token_double("scale");
    if (scale == 0.0) fail_at_byte(path, r.offset(), "zero scale");
    const bool little_endian = scale < 0.0;
    r.expect_single_whitespace("payload");

    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<float> row(static_cast<std::size_t>(width));
    DepthMap depth;
    depth.width = width;
    depth.height = height;
    depth.values.resize(n);
    // PFM stores the bottom row first.
    for (int y = height - 1; y >= 0; --y) {
        r.read(row.data(), row.size() * 4, "PFM payload");
        for (int x = 0; x < width; ++x) {
            std::uint32_t bits;
            std::memcpy(&bits, &row[static_cast<std::size_t>(x)], 4);
            if (!little_endian) bits = __builtin_bswap32(bits);
            depth.at(x, y) = static_cast<double>(std::bit_cast<float>(bits));
        }
    }
    r.expect_exhausted("PFM payload");
    return depth;
}

void write_pfm(const DepthMap& depth, const std::filesystem::path& path) {
    check_raster_dims(depth.width, depth.height, path);
    std::string out = "Pf\n" + std::to_string(depth.width) + " " +
                      std::to_string(depth.height) + "\n-1.0\n";
    out.reserve(out.size() + depth.values.size() * 4);
    for (int y = depth.height - 1; y >= 0; --y) {
        for (int x = 0; x < depth.width; ++x) {
            const double d = depth.at(x, y);
            const float stored = depth.valid_at(x, y) ? static_cast<float>(d) : 0.0f;
            append_f32_le(out, stored);
        }
    }
    write_file_atomic(path, out);
}

LabelMask read_pgm(const std::filesystem::path& path, MaskKind kind) {
    ByteReader r(read_file(path), path);
    const std::string magic = r.token("PGM magic");
    if (magic != "P5") fail_at_byte(path, 0, "bad magic, expected P5");
    const int width = r.token_int("width", 1, kMaxRasterDim);
    const int height = r.token_int("height", 1, kMaxRasterDim);
    const int maxval = r.token_int("maxval", 1, 65535);
    r.expect_single_whitespace("payload");

    LabelMask mask = LabelMask::zeros(width, height, kind);
    const bool wide = maxval > 255;
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        std::uint8_t b[2];
        r.read(b, wide ? 2 : 1, "PGM payload");
        const std::uint32_t v = wide ? (static_cast<std::uint32_t>(b[0]) << 8) | b[1] : b[0];
        if (v > static_cast<std::uint32_t>(maxval))
            fail_at_byte(path, r.offset() - (wide ? 2 : 1),
                         "sample exceeds maxval " + std::to_string(maxval));
        mask.values[i] = v;
    }
    r.expect_exhausted("PGM payload");
    if (auto err = validate(mask)) fail(path, *err);
    return mask;
}

void write_pgm(const LabelMask& mask, const std::filesystem::path& path) {
    check_raster_dims(mask.width, mask.height, path);
    std::uint32_t max_label = 0;
    for (const std::uint32_t v : mask.values) max_label = std::max(max_label, v);
    if (max_label > 65535)
        throw IoError(path.string() + ": label overflow, " + std::to_string(max_label) +
                      " does not fit 16-bit PGM");
    const bool wide = max_label > 255;
    std::string out = "P5\n" + std::to_string(mask.width) + " " +
                      std::to_string(mask.height) + "\n" + (wide ? "65535" : "255") + "\n";
    out.reserve(out.size() + mask.values.size() * (wide ? 2 : 1));
    for (const std::uint32_t v : mask.values) {
        if (wide) out.push_back(static_cast<char>((v >> 8) & 0xff));
        out.push_back(static_cast<char>(v & 0xff));
    }
    write_file_atomic(path, out);
}

Trajectory read_trajectory_tum(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    Trajectory trajectory;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        double t, tx, ty, tz, qx, qy, qz, qw;
        if (!(fields >> t >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
            fail_at_line(path, line_no, "expected 8 fields `timestamp tx ty tz qx qy qz qw`");
        std::string extra;
        if (fields >> extra)
            fail_at_line(path, line_no, "trailing field '" + extra + "'");

        Eigen::Quaterniond q(qw, qx, qy, qz);
        if (std::abs(q.norm() - 1.0) > 1e-3)
            fail_at_line(path, line_no,
                         "non-normalized quaternion, |q| = " + std::to_string(q.norm()));
        q.normalize();

        if (!trajectory.empty() && !(t > trajectory.back().timestamp))
            fail_at_line(path, line_no, "non-monotone timestamps");

        StampedPose sp;
        sp.timestamp = t;
        sp.pose.rotation = q.toRotationMatrix();
        sp.pose.translation = Eigen::Vector3d(tx, ty, tz);
        trajectory.push_back(sp);
    }
    return trajectory;
}

void write_trajectory_tum(const Trajectory& trajectory, const std::filesystem::path& path) {
    std::string out = "# timestamp tx ty tz qx qy qz qw\n";
    char buf[32];
    for (const StampedPose& sp : trajectory) {
        const Eigen::Quaterniond q = canonical_quaternion(sp.pose.rotation);
        const double fields[8] = {sp.timestamp,
                                  sp.pose.translation.x(),
                                  sp.pose.translation.y(),
                                  sp.pose.translation.z(),
                                  q.x(),
                                  q.y(),
                                  q.z(),
                                  q.w()};
        for (int i = 0; i < 8; ++i) {
            if (i) out += ' ';
            out += format_g17(buf, sizeof(buf), fields[i]);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

Trajectory read_trajectory_kitti(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    Trajectory trajectory;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        double m[12];
        for (int i = 0; i < 12; ++i) {
            if (!(fields >> m[i]))
                fail_at_line(path, line_no, "expected 12 fields (3x4 row-major [R|t])");
        }
        std::string extra;
        if (fields >> extra)
            fail_at_line(path, line_no, "trailing field '" + extra + "'");

        Eigen::Matrix3d rotation;
        rotation << m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10];
        const Eigen::Matrix3d gram = rotation.transpose() * rotation;
        if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
            rotation.determinant() < 0.0)
            fail_at_line(path, line_no, "non-orthonormal rotation block");
        // Snap to the nearest rotation so downstream 1e-9 invariants hold.
        const Eigen::JacobiSVD<Eigen::Matrix3d> svd(
            rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Matrix3d snapped = svd.matrixU() * svd.matrixV().transpose();
        if (snapped.determinant() < 0.0) {
            Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
            flip(2, 2) = -1.0;
            snapped = svd.matrixU() * flip * svd.matrixV().transpose();
        }

        StampedPose sp;
        sp.timestamp = static_cast<double>(trajectory.size());
        sp.pose.rotation = snapped;
        sp.pose.translation = Eigen::Vector3d(m[3], m[7], m[11]);
        trajectory.push_back(sp);
    }
    return trajectory;
}

void write_trajectory_kitti(const Trajectory& trajectory, const std::filesystem::path& path) {
    std::string out;
    char buf[32];
    for (const StampedPose& sp : trajectory) {
        const Eigen::Matrix3d& r = sp.pose.rotation;
        const Eigen::Vector3d& t = sp.pose.translation;
        const double fields[12] = {r(0, 0), r(0, 1), r(0, 2), t.x(),
                                   r(1, 0), r(1, 1), r(1, 2), t.y(),
                                   r(2, 0), r(2, 1), r(2, 2), t.z()};
        for (int i = 0; i < 12; ++i) {
            if (i) out += ' ';
            out += format_g17(buf, sizeof(buf), fields[i]);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

CameraIntrinsics read_intrinsics(const std::filesystem::path& path) {
    ByteReader r(read_file(path), path);
    CameraIntrinsics k;
    k.fx = r.token_double("fx");
    k.fy = r.token_double("fy");
    k.cx = r.token_double("cx");
    k.cy = r.token_double("cy");
    k.width = r.token_int("width", 1, kMaxRasterDim);
    k.height = r.token_int("height", 1, kMaxRasterDim);
    if (auto err = validate(k)) fail(path, *err);
    return k;
}

void write_intrinsics(const CameraIntrinsics& k, const std::filesystem::path& path) {
    char buf[32];
    std::string out;
    const double fields[4] = {k.fx, k.fy, k.cx, k.cy};
    for (double f : fields) {
        out += format_g17(buf, sizeof(buf), f);
        out += ' ';
    }
    out += std::to_string(k.width) + " " + std::to_string(k.height) + "\n";
    write_file_atomic(path, out);
}

}  // namespace sfg::io
