#include "canopy/geo/projection.hpp"

#include <cmath>
#include <limits>

#include "canopy/geo/mercator.hpp"
#include "canopy/util/error.hpp"

namespace canopy::geo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// WGS84 / UTM constants.
constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;
constexpr double kK0 = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;

constexpr double kN = kF / (2.0 - kF); // third flattening
constexpr double kN2 = kN * kN;
constexpr double kN3 = kN2 * kN;
constexpr double kN4 = kN2 * kN2;
constexpr double kN5 = kN4 * kN;
constexpr double kN6 = kN4 * kN2;

// Rectifying radius and the Krueger series coefficients, order n^6.
constexpr double kRectA =
    kA / (1.0 + kN) * (1.0 + kN2 / 4.0 + kN4 / 64.0 + kN6 / 256.0);

constexpr double kAlpha[6] = {
    kN / 2.0 - 2.0 / 3.0 * kN2 + 5.0 / 16.0 * kN3 + 41.0 / 180.0 * kN4 -
        127.0 / 288.0 * kN5 + 7891.0 / 37800.0 * kN6,
    13.0 / 48.0 * kN2 - 3.0 / 5.0 * kN3 + 557.0 / 1440.0 * kN4 +
        281.0 / 630.0 * kN5 - 1983433.0 / 1935360.0 * kN6,
    61.0 / 240.0 * kN3 - 103.0 / 140.0 * kN4 + 15061.0 / 26880.0 * kN5 +
        167603.0 / 181440.0 * kN6,
    49561.0 / 161280.0 * kN4 - 179.0 / 168.0 * kN5 +
        6601661.0 / 7257600.0 * kN6,
    34729.0 / 80640.0 * kN5 - 3418889.0 / 1995840.0 * kN6,
    212378941.0 / 319334400.0 * kN6,
};

constexpr double kBeta[6] = {
    kN / 2.0 - 2.0 / 3.0 * kN2 + 37.0 / 96.0 * kN3 - 1.0 / 360.0 * kN4 -
        81.0 / 512.0 * kN5 + 96199.0 / 604800.0 * kN6,
    1.0 / 48.0 * kN2 + 1.0 / 15.0 * kN3 - 437.0 / 1440.0 * kN4 +
        46.0 / 105.0 * kN5 - 1118711.0 / 3870720.0 * kN6,
    17.0 / 480.0 * kN3 - 37.0 / 840.0 * kN4 - 209.0 / 4480.0 * kN5 +
        5569.0 / 90720.0 * kN6,
    4397.0 / 161280.0 * kN4 - 11.0 / 504.0 * kN5 -
        830251.0 / 7257600.0 * kN6,
    4583.0 / 161280.0 * kN5 - 108847.0 / 3991680.0 * kN6,
    20648693.0 / 638668800.0 * kN6,
};

const double kE = std::sqrt(kF * (2.0 - kF)); // first eccentricity

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

double hyp(double x) { return std::hypot(1.0, x); }

// tan(conformal latitude) from tan(latitude).
double taupf(double tau) {
    const double tau1 = hyp(tau);
    const double sig = std::sinh(kE * std::atanh(kE * tau / tau1));
    return hyp(sig) * tau - sig * tau1;
}

// Inverse of taupf by Newton iteration.
double tauf(double taup) {
    constexpr int kMaxIter = 5;
    const double tol = std::sqrt(std::numeric_limits<double>::epsilon()) / 10.0;
    const double e2m = 1.0 - kE * kE;
    double tau = std::abs(taup) > 70.0 ? taup * std::exp(kE * std::atanh(kE))
                                       : taup / e2m;
    if (!(std::abs(tau) < 2.0 / std::sqrt(std::numeric_limits<double>::epsilon())))
        return tau;
    for (int i = 0; i < kMaxIter; ++i) {
        const double taupa = taupf(tau);
        const double dtau =
            (taup - taupa) * (1.0 + e2m * tau * tau) / (e2m * hyp(tau) * hyp(taupa));
        tau += dtau;
        if (!(std::abs(dtau) >= tol * (1.0 + std::abs(taup)))) break;
    }
    return tau;
}

struct UtmZone {
    int zone;   // 1..60
    bool south;
};

bool parse_utm(int epsg, UtmZone& out) {
    if (epsg >= 32601 && epsg <= 32660) {
        out = {epsg - 32600, false};
        return true;
    }
    if (epsg >= 32701 && epsg <= 32760) {
        out = {epsg - 32700, true};
        return true;
    }
    return false;
}

Vec2 tm_forward(double lon_deg, double lat_deg, double lon0_deg) {
    const double phi = deg2rad(lat_deg);
    double dlam = lon_deg - lon0_deg;
    while (dlam > 180.0) dlam -= 360.0;
    while (dlam < -180.0) dlam += 360.0;
    const double lam = deg2rad(dlam);

    const double taup = taupf(std::tan(phi));
    const double xip = std::atan2(taup, std::cos(lam));
    const double etap = std::asinh(std::sin(lam) / std::hypot(taup, std::cos(lam)));

    double xi = xip, eta = etap;
    for (int j = 1; j <= 6; ++j) {
        xi += kAlpha[j - 1] * std::sin(2.0 * j * xip) * std::cosh(2.0 * j * etap);
        eta += kAlpha[j - 1] * std::cos(2.0 * j * xip) * std::sinh(2.0 * j * etap);
    }
    return {kK0 * kRectA * eta, kK0 * kRectA * xi};
}

LonLat tm_inverse(double x, double y, double lon0_deg) {
    const double xi = y / (kK0 * kRectA);
    const double eta = x / (kK0 * kRectA);

    double xip = xi, etap = eta;
    for (int j = 1; j <= 6; ++j) {
        xip -= kBeta[j - 1] * std::sin(2.0 * j * xi) * std::cosh(2.0 * j * eta);
        etap -= kBeta[j - 1] * std::cos(2.0 * j * xi) * std::sinh(2.0 * j * eta);
    }
    const double taup = std::sin(xip) / std::hypot(std::sinh(etap), std::cos(xip));
    const double phi = std::atan(tauf(taup));
    const double lam = std::atan2(std::sinh(etap), std::cos(xip));

    LonLat p;
    p.lat = rad2deg(phi);
    p.lon = lon0_deg + rad2deg(lam);
    if (p.lon >= 180.0) p.lon -= 360.0;
    if (p.lon < -180.0) p.lon += 360.0;
    return p;
}

[[noreturn]] void throw_unsupported(int epsg) {
    throw ConfigError("unsupported EPSG:" + std::to_string(epsg) +
                      " (supported: 4326, 3857, 32601-32660, 32701-32760)");
}

} // namespace

bool epsg_supported(int epsg) {
    UtmZone z;
    return epsg == 4326 || epsg == 3857 || parse_utm(epsg, z);
}

std::string epsg_name(int epsg) {
    UtmZone z;
    if (epsg == 4326) return "WGS84 geographic (lon/lat degrees)";
    if (epsg == 3857) return "WGS84 web mercator";
    if (parse_utm(epsg, z))
        return "WGS84 UTM zone " + std::to_string(z.zone) + (z.south ? "S" : "N");
    return "unknown";
}

Vec2 lonlat_to_projected(int epsg, const LonLat& p) {
    if (epsg == 4326) return {p.lon, p.lat};
    if (epsg == 3857) return lonlat_to_mercator(p.lon, p.lat);
    UtmZone z;
    if (!parse_utm(epsg, z)) throw_unsupported(epsg);
    const double lon0 = utm_central_meridian_deg(epsg);
    Vec2 xy = tm_forward(p.lon, p.lat, lon0);
    xy.x += kFalseEasting;
    if (z.south) xy.y += kFalseNorthingSouth;
    return xy;
}

LonLat projected_to_lonlat(int epsg, const Vec2& xy) {
    if (epsg == 4326) return {xy.x, xy.y};
    if (epsg == 3857) return mercator_to_lonlat(xy.x, xy.y);
    UtmZone z;
    if (!parse_utm(epsg, z)) throw_unsupported(epsg);
    const double lon0 = utm_central_meridian_deg(epsg);
    const double x = xy.x - kFalseEasting;
    const double y = xy.y - (z.south ? kFalseNorthingSouth : 0.0);
    return tm_inverse(x, y, lon0);
}

int utm_epsg_for(const LonLat& p) {
    if (!(p.lon >= -180.0 && p.lon <= 180.0))
        throw DomainError("longitude out of range for UTM zone selection");
    int zone = static_cast<int>(std::floor((p.lon + 180.0) / 6.0)) + 1;
    if (zone < 1) zone = 1;
    if (zone > 60) zone = 60;
    return (p.lat >= 0.0 ? 32600 : 32700) + zone;
}

double utm_central_meridian_deg(int epsg) {
    UtmZone z;
    if (!parse_utm(epsg, z)) throw_unsupported(epsg);
    return (static_cast<double>(z.zone) - 30.5) * 6.0;
}

} // namespace canopy::geo
