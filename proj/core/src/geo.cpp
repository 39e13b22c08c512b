#include "narrator/geo.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>

#include "narrator/csv.hpp"
#include "narrator/errors.hpp"

namespace narrator {

namespace {

constexpr double kEarthRadiusM = 6371000.0;

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

const char* movement_word(MovementStatus s) {
    switch (s) {
        case MovementStatus::Stopping: return "stopping";
        case MovementStatus::Walking: return "walking";
        case MovementStatus::Running: return "running";
        case MovementStatus::RidingVehicle: return "riding vehicle";
    }
    return "stopping";
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double dlat = to_rad(lat2 - lat1);
    const double dlon = to_rad(lon2 - lon1);
    const double sin_lat = std::sin(dlat / 2.0);
    const double sin_lon = std::sin(dlon / 2.0);
    double a = sin_lat * sin_lat + std::cos(to_rad(lat1)) * std::cos(to_rad(lat2)) * sin_lon * sin_lon;
    a = std::clamp(a, 0.0, 1.0);
    return kEarthRadiusM * 2.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

PlaceMap load_place_map(std::istream& in) {
    PlaceMap map;
    const auto rows = read_csv(in);
    if (rows.empty()) return map;
    int lat_col = -1, lon_col = -1, label_col = -1;
    for (int i = 0; i < static_cast<int>(rows[0].size()); ++i) {
        if (rows[0][i] == "lat") lat_col = i;
        if (rows[0][i] == "lon") lon_col = i;
        if (rows[0][i] == "label") label_col = i;
    }
    if (lat_col < 0 || lon_col < 0 || label_col < 0)
        throw MissingColumn("place map needs header lat,lon,label");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        const int needed = std::max({lat_col, lon_col, label_col});
        if (static_cast<int>(row.size()) <= needed)
            throw MissingColumn("place map row " + std::to_string(r + 1) + " too short");
        map.push_back({std::stod(row[lat_col]), std::stod(row[lon_col]), row[label_col]});
    }
    return map;
}

std::vector<PlaceCluster> cluster_locations(const std::vector<GeoPoint>& points,
                                            double diameter_m) {
    std::vector<PlaceCluster> result;
    if (points.empty()) return result;

    // Stationary phones log long runs of bit-identical fixes; coalescing
    // exact duplicates first is lossless for complete linkage (a duplicate
    // group's max distance to anything equals its representative's) and
    // keeps the distance matrix at the number of distinct coordinates.
    std::map<std::pair<double, double>, std::size_t> seen;
    std::vector<std::vector<std::size_t>> group_members;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const auto key = std::make_pair(points[p].lat, points[p].lon);
        auto [it, inserted] = seen.try_emplace(key, group_members.size());
        if (inserted) group_members.emplace_back();
        group_members[it->second].push_back(p);
    }

    // Lance-Williams complete linkage over a dense distance matrix; merging
    // i and j updates D(ij, k) = max(D(i,k), D(j,k)). Quadratic in distinct
    // coordinates, which is fine at single-participant scale.
    const std::size_t n = group_members.size();
    std::vector<double> dist(n * n, 0.0);
    auto d = [&](std::size_t i, std::size_t j) -> double& { return dist[i * n + j]; };
    auto rep = [&](std::size_t g) -> const GeoPoint& { return points[group_members[g].front()]; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d(i, j) = d(j, i) = haversine_m(rep(i).lat, rep(i).lon, rep(j).lat, rep(j).lon);

    std::vector<std::vector<std::size_t>> members(n);  // group ids
    std::vector<bool> alive(n, true);
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};

    // Cached nearest neighbor per row. Complete-linkage updates only grow
    // distances, so a cached entry stays valid until its target merges.
    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> nn(n, kNone);
    std::vector<double> nnd(n, std::numeric_limits<double>::infinity());
    auto recompute_nn = [&](std::size_t i) {
        nn[i] = kNone;
        nnd[i] = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !alive[j]) continue;
            if (d(i, j) < nnd[i]) {
                nnd[i] = d(i, j);
                nn[i] = j;
            }
        }
    };
    for (std::size_t i = 0; i < n; ++i) recompute_nn(i);

    while (true) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = kNone;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            if (nnd[i] < best) {
                best = nnd[i];
                bi = i;
            }
        }
        if (bi == kNone || best > diameter_m) break;
        std::size_t bj = nn[bi];
        if (bj < bi) std::swap(bi, bj);
        // Fold j into i.
        for (std::size_t k = 0; k < n; ++k) {
            if (!alive[k] || k == bi || k == bj) continue;
            d(bi, k) = d(k, bi) = std::max(d(bi, k), d(bj, k));
        }
        members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
        alive[bj] = false;
        members[bj].clear();
        recompute_nn(bi);
        for (std::size_t k = 0; k < n; ++k)
            if (alive[k] && k != bi && (nn[k] == bi || nn[k] == bj)) recompute_nn(k);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        PlaceCluster c;
        for (std::size_t g : members[i])
            c.members.insert(c.members.end(), group_members[g].begin(), group_members[g].end());
        std::sort(c.members.begin(), c.members.end());
        c.member_count = c.members.size();
        double lat_sum = 0.0, lon_sum = 0.0;
        for (std::size_t m : c.members) {
            lat_sum += points[m].lat;
            lon_sum += points[m].lon;
        }
        c.centroid_lat = lat_sum / static_cast<double>(c.member_count);
        c.centroid_lon = lon_sum / static_cast<double>(c.member_count);
        result.push_back(std::move(c));
    }

    std::sort(result.begin(), result.end(), [](const PlaceCluster& a, const PlaceCluster& b) {
        if (a.member_count != b.member_count) return a.member_count > b.member_count;
        return a.members.front() < b.members.front();
    });
    for (std::size_t i = 0; i < result.size(); ++i) result[i].id = static_cast<int>(i + 1);
    return result;
}

HomeModel detect_home(std::vector<PlaceCluster>& clusters, const std::vector<GeoPoint>& points,
                      const NightWindow& window, const Timezone& zone) {
    std::size_t total_night = 0;
    for (auto& cluster : clusters) {
        cluster.nighttime_count = 0;
        for (std::size_t m : cluster.members) {
            if (window.contains(zone.parts(points[m].ts).second_of_day())) {
                ++cluster.nighttime_count;
                ++total_night;
            }
        }
    }
    if (total_night == 0)
        throw NoNighttimeData("no location fix falls inside the nighttime window");

    const PlaceCluster* best = nullptr;
    for (const auto& cluster : clusters) {
        if (!best || cluster.nighttime_count > best->nighttime_count ||
            (cluster.nighttime_count == best->nighttime_count &&
             (cluster.member_count > best->member_count ||
              (cluster.member_count == best->member_count && cluster.id < best->id))))
            best = &cluster;
    }
    return HomeModel{best->id, window};
}

MovementStatus classify_movement(double speed_mps, double stop_epsilon) {
    if (speed_mps < 0) throw NegativeSpeed("speed must be non-negative");
    if (speed_mps <= stop_epsilon) return MovementStatus::Stopping;
    if (speed_mps <= 1.0) return MovementStatus::Walking;
    if (speed_mps <= 3.0) return MovementStatus::Running;
    return MovementStatus::RidingVehicle;
}

std::optional<std::string> resolve_place(double lat, double lon, const PlaceMap& place_map,
                                         double max_snap_m) {
    const PlaceEntry* best = nullptr;
    double best_d = 0.0;
    for (const auto& entry : place_map) {
        const double dist = haversine_m(lat, lon, entry.lat, entry.lon);
        if (dist <= max_snap_m && (!best || dist < best_d)) {
            best = &entry;
            best_d = dist;
        }
    }
    if (!best) return std::nullopt;
    return best->label;
}

void label_clusters(std::vector<PlaceCluster>& clusters, const PlaceMap& place_map,
                    double max_snap_m) {
    for (auto& cluster : clusters)
        cluster.label = resolve_place(cluster.centroid_lat, cluster.centroid_lon, place_map,
                                      max_snap_m);
}

namespace {

std::string coordinate_fallback(double lat, double lon) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5f,%.5f", lat, lon);
    return buf;
}

double round1(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace

LocationNarration locate(const GeoPoint& point, double speed_mps,
                         const std::vector<PlaceCluster>& clusters,
                         const std::optional<HomeModel>& home, const PlaceMap& place_map,
                         double max_snap_m, double stop_epsilon) {
    LocationNarration out;
    out.status = classify_movement(speed_mps, stop_epsilon);

    const PlaceCluster* nearest = nullptr;
    const PlaceCluster* home_cluster = nullptr;
    double nearest_d = 0.0;
    for (const auto& cluster : clusters) {
        const double dist =
            haversine_m(point.lat, point.lon, cluster.centroid_lat, cluster.centroid_lon);
        if (!nearest || dist < nearest_d) {
            nearest = &cluster;
            nearest_d = dist;
        }
        if (home && cluster.id == home->home_cluster_id) home_cluster = &cluster;
    }

    out.is_home = nearest && home_cluster && nearest->id == home_cluster->id;
    if (out.is_home) return out;

    const double plat = nearest ? nearest->centroid_lat : point.lat;
    const double plon = nearest ? nearest->centroid_lon : point.lon;
    out.place_label = resolve_place(plat, plon, place_map, max_snap_m);
    out.coordinates = coordinate_fallback(plat, plon);
    if (home_cluster)
        out.distance_from_home_m = round1(
            haversine_m(point.lat, point.lon, home_cluster->centroid_lat,
                        home_cluster->centroid_lon));
    return out;
}

double effective_speed(const std::optional<GeoPoint>& prev, const GeoPoint& cur) {
    if (cur.speed_mps) return *cur.speed_mps;
    if (!prev) return 0.0;
    const double dt_s = static_cast<double>(cur.ts.epoch_ms - prev->ts.epoch_ms) / 1000.0;
    if (dt_s <= 0 || dt_s > 5 * 60) return 0.0;
    return haversine_m(prev->lat, prev->lon, cur.lat, cur.lon) / dt_s;
}

GeoPipeline::GeoPipeline(const std::vector<SensorEvent>& merged_events, const PlaceMap& place_map,
                         const GeoOptions& opts, const Timezone& zone) {
    for (const auto& ev : merged_events) {
        if (const auto* loc = std::get_if<Location>(&ev.payload)) {
            points_.push_back({loc->lat, loc->lon, ev.ts, loc->speed_mps});
            keys_.emplace_back(ev.ts.epoch_ms, ev.row_id);
        }
    }

    clusters_ = cluster_locations(points_, opts.diameter_m);
    label_clusters(clusters_, place_map, opts.max_snap_m);
    try {
        home_ = detect_home(clusters_, points_, opts.night_window, zone);
    } catch (const NoNighttimeData&) {
        home_ = std::nullopt;
    }

    narrations_.reserve(points_.size());
    std::optional<GeoPoint> prev;
    for (const auto& point : points_) {
        const double speed = effective_speed(prev, point);
        narrations_.push_back(locate(point, speed, clusters_, home_, place_map, opts.max_snap_m,
                                     opts.stop_epsilon));
        prev = point;
    }

    key_index_.resize(keys_.size());
    for (std::size_t i = 0; i < keys_.size(); ++i) key_index_[i] = i;
    std::sort(key_index_.begin(), key_index_.end(),
              [&](std::size_t a, std::size_t b) { return keys_[a] < keys_[b]; });
}

const LocationNarration* GeoPipeline::narration_for(Timestamp ts, std::int64_t row_id) const {
    const std::pair<std::int64_t, std::int64_t> key{ts.epoch_ms, row_id};
    auto it = std::lower_bound(key_index_.begin(), key_index_.end(), key,
                               [&](std::size_t idx, const auto& k) { return keys_[idx] < k; });
    if (it == key_index_.end() || keys_[*it] != key) return nullptr;
    return &narrations_[*it];
}

}  // namespace narrator
