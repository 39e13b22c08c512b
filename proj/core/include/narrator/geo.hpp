#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "narrator/events.hpp"
#include "narrator/time.hpp"

namespace narrator {

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
    Timestamp ts;
    std::optional<double> speed_mps;
};

struct PlaceCluster {
    int id = 0;                 // 1-based, descending member count
    double centroid_lat = 0.0;  // arithmetic mean of members
    double centroid_lon = 0.0;
    std::size_t member_count = 0;
    std::size_t nighttime_count = 0;  // filled by detect_home
    std::optional<std::string> label;
    std::vector<std::size_t> members;  // indices into the clustered point set
};

enum class MovementStatus { Stopping, Walking, Running, RidingVehicle };

const char* movement_word(MovementStatus s);  // "stopping", "walking", ...

// Half-open local-time window, wraps midnight when start >= end.
struct NightWindow {
    int start_minute = 20 * 60;  // inclusive
    int end_minute = 4 * 60;     // exclusive

    bool contains(int second_of_day) const {
        const int start = start_minute * 60, end = end_minute * 60;
        if (start == end) return false;
        if (start < end) return second_of_day >= start && second_of_day < end;
        return second_of_day >= start || second_of_day < end;
    }
};

struct HomeModel {
    int home_cluster_id = 0;
    NightWindow night_window;
};

// Labeled coordinates substituting for online reverse geocoding.
struct PlaceEntry {
    double lat = 0.0;
    double lon = 0.0;
    std::string label;
};
using PlaceMap = std::vector<PlaceEntry>;

// CSV with header lat,lon,label.
PlaceMap load_place_map(std::istream& in);

// Great-circle distance in meters, spherical earth R = 6371 km.
double haversine_m(double lat1, double lon1, double lat2, double lon2);

// Complete-linkage agglomerative clustering: repeatedly merge the two
// clusters with the smallest maximum inter-point distance until any merge
// would exceed diameter_m. Every pair inside a cluster stays within the
// diameter. Ids are assigned 1..k in descending member count.
std::vector<PlaceCluster> cluster_locations(const std::vector<GeoPoint>& points,
                                            double diameter_m = 50.0);

// Home is the cluster with the most fixes inside the night window (local
// wall-clock). Fills nighttime_count on every cluster. Ties break by larger
// member_count, then lower id. Throws NoNighttimeData when no fix qualifies.
HomeModel detect_home(std::vector<PlaceCluster>& clusters, const std::vector<GeoPoint>& points,
                      const NightWindow& window, const Timezone& zone);

// Speed bins: <= stop_epsilon stopping, <= 1 walking, <= 3 running, else
// riding a vehicle. Throws NegativeSpeed.
MovementStatus classify_movement(double speed_mps, double stop_epsilon = 0.1);

// Label of the nearest place-map entry within max_snap_m, if any.
std::optional<std::string> resolve_place(double lat, double lon, const PlaceMap& place_map,
                                         double max_snap_m = 100.0);

// Fills PlaceCluster::label from the place map, by centroid.
void label_clusters(std::vector<PlaceCluster>& clusters, const PlaceMap& place_map,
                    double max_snap_m = 100.0);

struct LocationNarration {
    bool is_home = false;
    std::optional<std::string> place_label;      // resolved place-map label
    std::string coordinates;                     // "lat,lon" fallback, 5 decimals
    std::optional<double> distance_from_home_m;  // rounded to 1 decimal; absent at home
    MovementStatus status = MovementStatus::Stopping;

    // "home", the label, or the coordinate fallback when labels are masked.
    std::string place(bool include_place_labels = true) const {
        if (is_home) return "home";
        if (place_label && include_place_labels) return *place_label;
        return coordinates;
    }
};

// Narration inputs for one fix: nearest-centroid cluster assignment, home
// flag, distance from the fix to the home centroid.
LocationNarration locate(const GeoPoint& point, double speed_mps,
                         const std::vector<PlaceCluster>& clusters,
                         const std::optional<HomeModel>& home, const PlaceMap& place_map,
                         double max_snap_m = 100.0, double stop_epsilon = 0.1);

struct GeoOptions {
    double diameter_m = 50.0;
    double stop_epsilon = 0.1;
    double max_snap_m = 100.0;
    NightWindow night_window;
};

// Whole-run location pipeline: cluster all fixes (home detection needs
// cross-day night data), detect home, precompute one narration per fix.
class GeoPipeline {
public:
    GeoPipeline() = default;
    GeoPipeline(const std::vector<SensorEvent>& merged_events, const PlaceMap& place_map,
                const GeoOptions& opts, const Timezone& zone);

    const std::vector<PlaceCluster>& clusters() const { return clusters_; }
    const std::optional<HomeModel>& home() const { return home_; }
    const std::vector<GeoPoint>& points() const { return points_; }

    // Narration for the fix ingested as (ts, row_id); nullptr if unknown.
    const LocationNarration* narration_for(Timestamp ts, std::int64_t row_id) const;

private:
    std::vector<GeoPoint> points_;
    std::vector<PlaceCluster> clusters_;
    std::optional<HomeModel> home_;
    std::vector<LocationNarration> narrations_;
    std::vector<std::pair<std::int64_t, std::int64_t>> keys_;  // (epoch_ms, row_id), sorted
    std::vector<std::size_t> key_index_;
};

// When a fix lacks a recorded speed: derive it from the previous fix when
// the gap is at most five minutes, otherwise treat the fix as stationary.
double effective_speed(const std::optional<GeoPoint>& prev, const GeoPoint& cur);

}  // namespace narrator
