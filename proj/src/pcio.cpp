#include "seamforge/pcio.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace seamforge::pcio {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_g9(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) raise(ErrorCode::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) raise(ErrorCode::IoError, "rename failed for " + path.string() + ": " + ec.message());
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

[[noreturn]] void parse_fail(const fs::path& path, std::size_t line, const std::string& what) {
    raise(ErrorCode::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

// Cursor over file content with line tracking for error messages.
struct TextCursor {
    const char* p;
    const char* end;
    std::size_t line = 1;

    bool eof() const { return p >= end; }

    void skip_space_in_line() {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    }

    bool at_newline() const { return p < end && *p == '\n'; }

    void newline() {
        ++p;
        ++line;
    }

    std::string take_line() {
        const char* start = p;
        while (p < end && *p != '\n') ++p;
        std::string s(start, p);
        if (!s.empty() && s.back() == '\r') s.pop_back();
        if (p < end) newline();
        return s;
    }
};

double parse_double_token(TextCursor& cur, const fs::path& path) {
    cur.skip_space_in_line();
    char* after = nullptr;
    errno = 0;
    const double v = std::strtod(cur.p, &after);
    if (after == cur.p) parse_fail(path, cur.line, "expected a number");
    cur.p = after;
    return v;
}

}  // namespace

PointCloud read_ply(const fs::path& path) {
    const std::string content = read_file(path);
    TextCursor cur{content.data(), content.data() + content.size()};

    if (cur.take_line() != "ply") parse_fail(path, 1, "missing 'ply' magic line");

    std::size_t vertex_count = 0;
    bool have_vertex_element = false;
    bool with_normals = false;
    bool header_done = false;
    bool format_seen = false;
    std::string current_element;
    std::vector<std::string> vertex_props;

    while (!cur.eof()) {
        const std::size_t line_no = cur.line;
        const std::string line = cur.take_line();
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word.empty() || word == "comment" || word == "obj_info") continue;
        if (word == "format") {
            std::string kind, version;
            ls >> kind >> version;
            if (kind != "ascii") parse_fail(path, line_no, "only ascii PLY is supported");
            format_seen = true;
        } else if (word == "element") {
            std::string name;
            std::size_t count = 0;
            if (!(ls >> name >> count)) parse_fail(path, line_no, "malformed element line");
            if (name == "vertex") {
                vertex_count = count;
                have_vertex_element = true;
            } else if (count != 0) {
                parse_fail(path, line_no, "unsupported element '" + name + "' with nonzero count");
            }
            current_element = name;
        } else if (word == "property") {
            if (current_element != "vertex") continue;  // properties of empty elements
            std::string type, name;
            ls >> type;
            if (type == "list") parse_fail(path, line_no, "list properties are not supported");
            ls >> name;
            if (type != "float" && type != "float32" && type != "double") {
                parse_fail(path, line_no, "unsupported property type '" + type + "'");
            }
            vertex_props.push_back(name);
        } else if (word == "end_header") {
            header_done = true;
            break;
        } else {
            parse_fail(path, line_no, "unexpected header line '" + word + "'");
        }
    }
    if (!header_done) parse_fail(path, cur.line, "missing 'end_header'");
    if (!format_seen) parse_fail(path, cur.line, "missing 'format ascii 1.0' line");
    if (!have_vertex_element) parse_fail(path, cur.line, "missing 'element vertex' declaration");

    const std::vector<std::string> plain = {"x", "y", "z"};
    const std::vector<std::string> normal = {"x", "y", "z", "nx", "ny", "nz"};
    if (vertex_props == normal) {
        with_normals = true;
    } else if (vertex_props != plain) {
        parse_fail(path, cur.line, "vertex properties must be x,y,z or x,y,z,nx,ny,nz");
    }

    PointCloud cloud;
    cloud.points.reserve(vertex_count);
    if (with_normals) cloud.normals.reserve(vertex_count);

    const std::size_t per_row = with_normals ? 6 : 3;
    for (std::size_t i = 0; i < vertex_count; ++i) {
        // Skip blank lines between rows.
        while (!cur.eof()) {
            cur.skip_space_in_line();
            if (cur.at_newline()) {
                cur.newline();
            } else {
                break;
            }
        }
        if (cur.eof()) parse_fail(path, cur.line, "unexpected end of file in vertex data");
        const std::size_t row_line = cur.line;
        double v[6];
        for (std::size_t c = 0; c < per_row; ++c) v[c] = parse_double_token(cur, path);
        cur.skip_space_in_line();
        if (!cur.eof() && !cur.at_newline()) parse_fail(path, row_line, "extra data in vertex row");
        if (!cur.eof()) cur.newline();

        for (std::size_t c = 0; c < per_row; ++c) {
            if (!std::isfinite(v[c])) {
                raise(ErrorCode::DataError, path.string() + ":" + std::to_string(row_line) +
                                                ": non-finite vertex value");
            }
            // Canonical storage is float32, matching the declared property type.
            v[c] = static_cast<double>(static_cast<float>(v[c]));
        }
        cloud.points.emplace_back(v[0], v[1], v[2]);
        if (with_normals) cloud.normals.emplace_back(v[3], v[4], v[5]);
    }
    cloud.validate();
    return cloud;
}

void write_ply(const PointCloud& cloud, const fs::path& path) {
    cloud.validate();
    const bool with_normals = cloud.has_normals();

    std::string out;
    out.reserve(64 + cloud.size() * (with_normals ? 96 : 48));
    out += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) + "\n";
    out += "property float x\nproperty float y\nproperty float z\n";
    if (with_normals) out += "property float nx\nproperty float ny\nproperty float nz\n";
    out += "end_header\n";

    char buf[256];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.points[i];
        if (with_normals) {
            const Vec3& n = cloud.normals[i];
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g %.9g %.9g\n",
                          static_cast<float>(p.x()), static_cast<float>(p.y()),
                          static_cast<float>(p.z()), static_cast<float>(n.x()),
                          static_cast<float>(n.y()), static_cast<float>(n.z()));
        } else {
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", static_cast<float>(p.x()),
                          static_cast<float>(p.y()), static_cast<float>(p.z()));
        }
        out += buf;
    }
    atomic_write(path, out);
}

namespace {

json pose_to_json(const RigidTransform& t) {
    const Mat4 m = t.matrix();
    json a = json::array();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) a.push_back(m(r, c));
    }
    return a;
}

RigidTransform pose_from_json(const json& a, const fs::path& file, const std::string& what) {
    if (!a.is_array() || a.size() != 16) {
        raise(ErrorCode::ParseError,
              file.string() + ": " + what + " must be an array of 16 numbers");
    }
    Mat4 m;
    for (int i = 0; i < 16; ++i) {
        if (!a[i].is_number()) {
            raise(ErrorCode::ParseError, file.string() + ": " + what + " entry is not a number");
        }
        m(i / 4, i % 4) = a[i].get<double>();
    }
    try {
        return RigidTransform::from_matrix(m, 1e-6);
    } catch (const Error&) {
        raise(ErrorCode::InvalidPose, file.string() + ": " + what + " is not a rigid transform");
    }
}

}  // namespace

ScanSession read_session(const fs::path& dir) {
    const fs::path json_path = dir / "session.json";
    json doc;
    try {
        doc = json::parse(read_file(json_path));
    } catch (const json::exception& e) {
        raise(ErrorCode::ParseError, json_path.string() + ": " + e.what());
    }

    ScanSession session;
    if (!doc.contains("hand_eye")) {
        raise(ErrorCode::ParseError, json_path.string() + ": missing 'hand_eye'");
    }
    session.hand_eye = pose_from_json(doc["hand_eye"], json_path, "hand_eye");

    if (!doc.contains("frames") || !doc["frames"].is_array() || doc["frames"].empty()) {
        raise(ErrorCode::ParseError, json_path.string() + ": 'frames' must be a non-empty array");
    }
    for (const json& f : doc["frames"]) {
        if (!f.contains("ply") || !f.contains("end_effector_pose")) {
            raise(ErrorCode::ParseError,
                  json_path.string() + ": frame needs 'ply' and 'end_effector_pose'");
        }
        const RigidTransform ee =
            pose_from_json(f["end_effector_pose"], json_path, "end_effector_pose");
        ScanFrame frame;
        frame.cloud = read_ply(dir / f["ply"].get<std::string>());
        frame.camera_pose = ee.compose(session.hand_eye);
        session.frames.push_back(std::move(frame));
    }

    if (doc.contains("metadata")) {
        for (const auto& [k, v] : doc["metadata"].items()) {
            session.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    }
    if (doc.contains("true_end_effector_poses")) {
        for (const json& p : doc["true_end_effector_poses"]) {
            const RigidTransform ee = pose_from_json(p, json_path, "true_end_effector_pose");
            session.true_camera_poses.push_back(ee.compose(session.hand_eye));
        }
    }
    return session;
}

void write_session(const ScanSession& session, const fs::path& dir) {
    if (session.frames.empty()) {
        raise(ErrorCode::EmptyInput, "session must contain at least one frame");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) raise(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

    const RigidTransform he_inv = session.hand_eye.inverse();
    json doc;
    doc["hand_eye"] = pose_to_json(session.hand_eye);
    doc["frames"] = json::array();
    for (std::size_t i = 0; i < session.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%03zu.ply", i);
        write_ply(session.frames[i].cloud, dir / name);
        json f;
        f["ply"] = name;
        f["end_effector_pose"] = pose_to_json(session.frames[i].camera_pose.compose(he_inv));
        doc["frames"].push_back(std::move(f));
    }
    if (!session.metadata.empty()) {
        doc["metadata"] = session.metadata;
    }
    if (!session.true_camera_poses.empty()) {
        json arr = json::array();
        for (const RigidTransform& t : session.true_camera_poses) {
            arr.push_back(pose_to_json(t.compose(he_inv)));
        }
        doc["true_end_effector_poses"] = std::move(arr);
    }
    atomic_write(dir / "session.json", doc.dump(2) + "\n");
}

void write_path_csv(const Path& path_points, const fs::path& path) {
    if (path_points.empty()) raise(ErrorCode::EmptyInput, "refusing to write an empty path");
    std::string out = "x,y,z,rx,ry,rz\n";
    out.reserve(out.size() + path_points.size() * 80);
    char buf[256];
    for (const PathPoint& pp : path_points) {
        if (!pp.frame_valid(1e-6)) {
            raise(ErrorCode::DataError, "path point frame is not orthonormal right-handed");
        }
        const Vec3 rv = pp.rotation_vector();
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", pp.position.x(),
                      pp.position.y(), pp.position.z(), rv.x(), rv.y(), rv.z());
        out += buf;
    }
    atomic_write(path, out);
}

Path read_path_csv(const fs::path& path) {
    const std::string content = read_file(path);
    TextCursor cur{content.data(), content.data() + content.size()};

    const std::string header = cur.take_line();
    if (header != "x,y,z,rx,ry,rz") parse_fail(path, 1, "expected header 'x,y,z,rx,ry,rz'");

    Path out;
    while (!cur.eof()) {
        const std::size_t line_no = cur.line;
        const std::string line = cur.take_line();
        if (line.empty()) continue;
        double v[6];
        const char* p = line.c_str();
        for (int c = 0; c < 6; ++c) {
            char* after = nullptr;
            v[c] = std::strtod(p, &after);
            if (after == p) parse_fail(path, line_no, "expected a number");
            p = after;
            if (c < 5) {
                if (*p != ',') parse_fail(path, line_no, "expected ',' between fields");
                ++p;
            }
        }
        while (*p == ' ' || *p == '\r') ++p;
        if (*p != '\0') parse_fail(path, line_no, "extra data after 6 fields");
        for (double x : v) {
            if (!std::isfinite(x)) {
                raise(ErrorCode::DataError,
                      path.string() + ":" + std::to_string(line_no) + ": non-finite value");
            }
        }
        out.push_back(PathPoint::from_rotation_vector(Vec3(v[0], v[1], v[2]),
                                                      Vec3(v[3], v[4], v[5])));
    }
    if (out.empty()) raise(ErrorCode::EmptyInput, path.string() + ": path file has no rows");
    return out;
}

}  // namespace seamforge::pcio
