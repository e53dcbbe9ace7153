#include "qcflow/catalog.hpp"

#include <sstream>

namespace qcflow {

namespace {

/// Splits "name(args)" into name and args ("" when absent).
std::pair<std::string, std::string> split_name(const std::string& full) {
    const auto open = full.find('(');
    if (open == std::string::npos) return {full, ""};
    if (full.back() != ')')
        throw UnknownCatalogEntry(full);
    return {full.substr(0, open), full.substr(open + 1, full.size() - open - 2)};
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) out.push_back(part);
    return out;
}

Mat parse_matrix(const std::string& args) {
    const auto rows = split_on(args, ';');
    const int n = static_cast<int>(rows.size());
    Mat A(n, n);
    for (int i = 0; i < n; ++i) {
        const auto entries = split_on(rows[static_cast<std::size_t>(i)], ',');
        if (static_cast<int>(entries.size()) != n)
            throw UnknownCatalogEntry("linear(" + args + ")");
        for (int j = 0; j < n; ++j)
            A(i, j) = std::stod(entries[static_cast<std::size_t>(j)]);
    }
    return A;
}

int parse_int(const std::string& s, int fallback) {
    if (s.empty()) return fallback;
    return std::stoi(s);
}

const char* kXLogAbs2d =
    "x1*log(sqrt(x1^2+x2^2)); x2*log(sqrt(x1^2+x2^2))";
// z = x1*x2*log(x1^2+x2^2): tangent frame of the graph, origin excluded
const char* kRoughGx =
    "1; 0; x2*log(x1^2+x2^2) + 2*x1^2*x2/(x1^2+x2^2)";
const char* kRoughGy =
    "0; 1; x1*log(x1^2+x2^2) + 2*x1*x2^2/(x1^2+x2^2)";

}  // namespace

CatalogObject load_catalog(const std::string& full) {
    const auto [name, args] = split_name(full);

    if (name == "identity") {
        const int n = parse_int(args, 3);
        std::ostringstream body;
        for (int i = 1; i <= n; ++i) body << (i > 1 ? "; " : "") << "x" << i;
        return VectorField::parsed(body.str(), n, DomainBox::cube(n, 10.0));
    }
    if (name == "rotation2d")
        return VectorField::parsed("-x2; x1", 2, DomainBox::cube(2, 10.0));
    if (name == "linear") {
        if (args.empty()) throw UnknownCatalogEntry("linear requires a matrix argument");
        Mat A = parse_matrix(args);
        return VectorField::linear(A, DomainBox::cube(static_cast<int>(A.rows()), 10.0));
    }
    if (name == "xloga")
        return VectorField::parsed(kXLogAbs2d, 2, DomainBox::cube(2, 10.0));
    if (name == "xloga1d")
        return VectorField::parsed("x1*log(abs(x1))", 1, DomainBox::cube(1, 10.0));
    if (name == "abskink")
        return VectorField::parsed("abs(x1); abs(x2)", 2, DomainBox::cube(2, 10.0));
    if (name == "shear2d")
        return VectorField::parsed("0; x1", 2, DomainBox::cube(2, 10.0));
    if (name == "constant") {
        auto parts = split_on(args, ',');
        if (parts.empty() || parts[0].size() < 2 || parts[0][0] != 'e')
            throw UnknownCatalogEntry(full);
        const int i = std::stoi(parts[0].substr(1));
        const int n = parts.size() > 1 ? std::stoi(parts[1]) : std::max(2, i);
        if (i < 1 || i > n) throw UnknownCatalogEntry(full);
        Vec v = Vec::Zero(n);
        v[i - 1] = 1.0;
        return VectorField::constant(v, DomainBox::cube(n, 10.0));
    }

    if (name == "contact3d") {
        std::vector<VectorField> frame = {
            VectorField::parsed("1; 0; 0", 3, DomainBox::cube(3, 2.0)),
            VectorField::parsed("0; 1; x1", 3, DomainBox::cube(3, 2.0))};
        return PlaneFieldDef(3, 2, std::move(frame), DomainBox::cube(3, 2.0));
    }
    if (name == "coords") {
        auto parts = split_on(args, ',');
        const int k = parts.size() > 0 && !parts[0].empty() ? std::stoi(parts[0]) : 2;
        const int n = parts.size() > 1 ? std::stoi(parts[1]) : k + 1;
        std::vector<VectorField> frame;
        for (int i = 0; i < k; ++i) {
            Vec v = Vec::Zero(n);
            v[i] = 1.0;
            frame.push_back(VectorField::constant(v, DomainBox::cube(n, 1.0)));
        }
        return PlaneFieldDef(n, k, std::move(frame), DomainBox::cube(n, 1.0));
    }
    if (name == "graph-parabola3d") {
        const DomainBox d = DomainBox::cube(3, 3.0);
        std::vector<VectorField> frame = {VectorField::parsed("1; 0; x1", 3, d),
                                          VectorField::parsed("0; 1; x2", 3, d)};
        return PlaneFieldDef(3, 2, std::move(frame), d);
    }
    if (name == "graph-xy3d") {
        const DomainBox d = DomainBox::cube(3, 3.0);
        std::vector<VectorField> frame = {VectorField::parsed("1; 0; x2", 3, d),
                                          VectorField::parsed("0; 1; x1", 3, d)};
        return PlaneFieldDef(3, 2, std::move(frame), d);
    }
    if (name == "graph-rough3d") {
        Vec lo(3), hi(3);
        lo << 0.05, 0.05, -2.0;
        hi << 2.0, 2.0, 2.0;
        const DomainBox d(lo, hi);
        std::vector<VectorField> frame = {VectorField::parsed(kRoughGx, 3, d),
                                          VectorField::parsed(kRoughGy, 3, d)};
        return PlaneFieldDef(3, 2, std::move(frame), d);
    }

    throw UnknownCatalogEntry(full);
}

VectorField load_catalog_field(const std::string& name) {
    CatalogObject obj = load_catalog(name);
    if (auto* f = std::get_if<VectorField>(&obj)) return *f;
    throw UnknownCatalogEntry(name + " is a plane field, not a vector field");
}

PlaneFieldDef load_catalog_plane(const std::string& name) {
    CatalogObject obj = load_catalog(name);
    if (auto* e = std::get_if<PlaneFieldDef>(&obj)) return *e;
    throw UnknownCatalogEntry(name + " is a vector field, not a plane field");
}

std::vector<CatalogListing> list_catalog() {
    return {
        {"identity(n)", "f(x) = x", false},
        {"rotation2d", "f(x) = (-x2, x1)", false},
        {"linear(a,b;c,d)", "f(x) = A x for the given square matrix", false},
        {"xloga", "f(x) = x log|x| on R^2 (borderline growth, bounded Sf)", false},
        {"xloga1d", "f(x) = x log|x| on R", false},
        {"abskink", "f(x) = (|x1|, |x2|) (Lipschitz, kinked on the axes)", false},
        {"shear2d", "f(x) = (0, x1)", false},
        {"constant(ei,n)", "constant coordinate field e_i in R^n", false},
        {"contact3d", "frame {e1, e2 + x1 e3} (non-involutive)", true},
        {"coords(k,n)", "coordinate frame {e1..ek} in R^n", true},
        {"graph-parabola3d", "tangent frame of z = (x1^2 + x2^2)/2", true},
        {"graph-xy3d", "tangent frame of z = x1 x2", true},
        {"graph-rough3d", "tangent frame of z = x1 x2 log(x1^2 + x2^2), origin excluded",
         true},
    };
}

}  // namespace qcflow
