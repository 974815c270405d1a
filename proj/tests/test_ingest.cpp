#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fadbio/ingest.hpp"
#include "util.hpp"

using namespace fadbio;

namespace {

const char* kLogbookHeader = "event_id,buoy_id,buoy_model,kind,date,lat,lon,catch_t\n";
const char* kEchoHeader = "buoy_id,ts_utc,lat,lon,l1,l2,l3,l4,l5,l6,l7,l8,l9,l10\n";

}  // namespace

TEST_CASE("logbook parsing keeps good rows and itemizes the bad ones") {
    TempDir tmp;
    const std::string path = tmp.file(
        "logbook.csv",
        std::string(kLogbookHeader) +
            "E1,B1,ISL+,SET,2019-01-20,1.5,-29.0,42.5\n"      // good set
            "E2,B1,SLX+,DEPLOY,2019-01-10,1.0,-29.5,\n"       // good deployment
            "E3,B2,XXX+,SET,2019-01-20,1.5,-29.0,10\n"        // bad model
            "E4,B2,ISL+,HAUL,2019-01-20,1.5,-29.0,10\n"       // bad kind
            "E5,B2,ISL+,SET,2019-02-30,1.5,-29.0,10\n"        // bad date
            "E6,B2,ISL+,SET,2019-01-20,95.0,-29.0,10\n"       // bad latitude
            "E7,B2,ISL+,SET,2019-01-20,1.5,-29.0,\n"          // set without catch
            "E8,B2,ISL+,SET,2019-01-20,1.5,-29.0,-3\n"        // negative catch
            "E9,B2,ISL+,DEPLOY,2019-01-20,1.5,-29.0,7\n"      // deployment with catch
            "E1,B3,ISL+,SET,2019-01-21,1.5,-29.0,10\n"        // duplicate id
            "E10,B2,ISL+,SET,2019-01-20,1.5,-29.0\n");        // short row
    const LogbookResult r = read_logbook(path);
    REQUIRE(r.events.size() == 2);
    CHECK(r.rejects.size() == 9);
    CHECK(r.rejects[0].line_no == 4);

    const Event& set = r.events[0];
    CHECK(set.event_id == "E1");
    CHECK(set.kind == EventKind::Set);
    CHECK(set.model == BuoyModel::Isl);
    CHECK(set.date == Date{2019, 1, 20});
    CHECK(set.catch_t == 42.5);
    const Event& dep = r.events[1];
    CHECK(dep.kind == EventKind::Deployment);
    CHECK(dep.catch_t == 0.0);
}

TEST_CASE("logbook requires the exact header") {
    TempDir tmp;
    const std::string path = tmp.file("bad.csv", "a,b,c\n1,2,3\n");
    CHECK_THROWS_AS(read_logbook(path), std::runtime_error);
}

TEST_CASE("echo parsing floors timestamps and deduplicates by (buoy, hour)") {
    TempDir tmp;
    const std::string path = tmp.file(
        "echo.csv",
        std::string(kEchoHeader) +
            "B1,2019-01-10T06:59:59Z,1.0,-29.0,1,0,0,0,0,0,0,0,0,0\n"
            "B1,2019-01-10T06:10:00Z,1.1,-29.0,0,5,0,0,0,0,0,0,0,0\n"  // same hour, stronger
            "B1,2019-01-10T07:00:00Z,1.0,-29.0,2,0,0,0,0,0,0,0,0,0\n"
            "B2,2019-01-10T06:30:00Z,1.0,-29.0,0,0,0,0,0,0,0,0,0,3\n"
            "B1,bad-time,1.0,-29.0,1,0,0,0,0,0,0,0,0,0\n"
            "B1,2019-01-10T08:00:00Z,1.0,-29.0,1,0,0,0,0,0,0,0,-1,0\n"  // negative layer
            "B1,2019-01-10T09:00:00Z,1.0,-29.0,1,0,0,0,0,0,0,0,x,0\n");  // junk layer
    const EchoResult r = read_echograms(path);
    REQUIRE(r.records.size() == 3);
    CHECK(r.rejects.size() == 4);  // duplicate + bad time + 2 bad layers

    // Both 06:xx records floor to 06:00; the larger layer sum wins.
    const EchoRecord& kept = r.records[0];
    CHECK(kept.t == utc_from({2019, 1, 10}, 6));
    CHECK(kept.layer_sum() == 5.0);
    CHECK(r.records[1].t == utc_from({2019, 1, 10}, 7));
    CHECK(r.records[2].buoy_id == "B2");
}

TEST_CASE("ocean grid: blanks become missing, duplicates are structural") {
    TempDir tmp;
    const std::string good = tmp.file(
        "ocean.csv",
        "date,lat,lon,temp,chl,o2,sal,thermo,cur,ssha\n"
        "2019-01-10,0,0,27.1,0.2,205,35.1,42,0.3,0.01\n"
        "2019-01-10,0,0.25,,0.2,205,35.1,42,0.3,0.01\n"
        "2019-01-11,0.25,0,26.9,0.2,205,35.1,42,0.3,-0.02\n");
    const OceanGrid g = read_ocean_grid(good);
    CHECK(g.lats.size() == 2);
    CHECK(g.lons.size() == 2);
    CHECK(g.days.size() == 2);

    const OceanSample s0 = nearest_cell(g, GeoPoint::make(0.01, -0.01), {2019, 1, 10});
    CHECK(s0.v[0] == 27.1);
    const OceanSample s1 = nearest_cell(g, GeoPoint::make(0.0, 0.2), {2019, 1, 10});
    CHECK(std::isnan(s1.v[0]));  // the blank temp
    CHECK(s1.v[1] == 0.2);
    // Cells never mentioned in the file are missing entirely.
    const OceanSample s2 = nearest_cell(g, GeoPoint::make(0.25, 0.25), {2019, 1, 10});
    CHECK(std::isnan(s2.v[0]));
    CHECK_THROWS_AS(nearest_cell(g, GeoPoint::make(0, 0), {2019, 1, 12}), std::out_of_range);

    const std::string dup = tmp.file(
        "ocean_dup.csv",
        "date,lat,lon,temp,chl,o2,sal,thermo,cur,ssha\n"
        "2019-01-10,0,0,27.1,0.2,205,35.1,42,0.3,0.01\n"
        "2019-01-10,0,0,27.2,0.2,205,35.1,42,0.3,0.01\n");
    CHECK_THROWS_AS(read_ocean_grid(dup), std::runtime_error);
}

TEST_CASE("bathymetry lookups pick the nearest node with low-coordinate ties") {
    TempDir tmp;
    const std::string path = tmp.file("bathy.csv",
                                      "lat,lon,depth_m\n"
                                      "0,0,3000\n"
                                      "0,1,150\n"
                                      "1,0,-20\n"
                                      "1,1,4000\n");
    const BathyGrid g = read_bathy_grid(path);
    CHECK(nearest_depth_m(g, GeoPoint::make(0.1, 0.1)) == 3000.0);
    CHECK(nearest_depth_m(g, GeoPoint::make(0.1, 0.9)) == 150.0);
    CHECK(nearest_depth_m(g, GeoPoint::make(0.9, 0.1)) == -20.0);
    CHECK(nearest_depth_m(g, GeoPoint::make(0.5, 0.5)) == 3000.0);  // ties go low on both axes
    CHECK(nearest_depth_m(g, GeoPoint::make(-5.0, -5.0)) == 3000.0);  // clamped to the edge
    CHECK(std::isnan(nearest_depth_m(BathyGrid{}, GeoPoint::make(0, 0))));
}

TEST_CASE("nearest axis index clamps and breaks ties low") {
    const std::vector<double> axis = {0.0, 1.0, 2.0};
    CHECK(nearest_axis_index(axis, -3.0) == 0);
    CHECK(nearest_axis_index(axis, 0.4) == 0);
    CHECK(nearest_axis_index(axis, 0.5) == 0);
    CHECK(nearest_axis_index(axis, 0.6) == 1);
    CHECK(nearest_axis_index(axis, 9.0) == 2);
}

TEST_CASE("thermocline depth interpolates the two-degree drop") {
    const std::vector<ProfileSample> profile = {
        {0.0, 25.0}, {40.0, 23.5}, {60.0, 22.5}, {100.0, 20.0}};
    const auto d = thermocline_depth(profile);
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(50.0));  // 23 degC crossed halfway between 40 and 60 m

    const std::vector<ProfileSample> warm = {{0.0, 25.0}, {100.0, 24.5}};
    CHECK_FALSE(thermocline_depth(warm).has_value());
    CHECK_FALSE(thermocline_depth(std::vector<ProfileSample>{{0.0, 25.0}}).has_value());
}
