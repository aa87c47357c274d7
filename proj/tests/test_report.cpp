#include <doctest.h>
#include <ebicsel/error.hpp>
#include <ebicsel/random.hpp>
#include <ebicsel/report.hpp>
#include <sstream>

using namespace ebicsel;

namespace {

SettingSummary summary(index_t n, double h, std::string label, double pm, double ps, double fm, double fs)
{
    SettingSummary s;
    s.setting = {CovarianceKind::PowerDecay, 1, n, h};
    s.gamma_label = std::move(label);
    s.pdr_mean = pm;
    s.pdr_sd = ps;
    s.fdr_mean = fm;
    s.fdr_sd = fs;
    s.replicates_completed = 200;
    return s;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_SUITE("report")
{
    TEST_CASE("cell format")
    {
        CHECK(format_cell(0.921, 0.159) == ".921(.159)");
        CHECK(format_cell(1.0, 0.0) == "1.000(.000)");
        CHECK(format_cell(0.08549, 0.1474) == ".085(.147)");
    }

    TEST_CASE("one summary gives a header and one row")
    {
        const std::vector s{summary(100, 0.8, "sc", 0.921, 0.159, 0.085, 0.147)};
        const auto csv = lines(emit_table(s, TableFormat::Csv));
        REQUIRE(csv.size() == 2);
        CHECK(csv[0] == "structure,c,n,h,pdr_sc,fdr_sc");
        CHECK(csv[1] == "I,1,100,0.8,.921(.159),.085(.147)");
        const auto md = emit_table(s, TableFormat::Markdown);
        CHECK(md.find("| 100 | 0.8 | .921(.159) | .085(.147) |") != std::string::npos);
    }

    TEST_CASE("csv and markdown carry the same cells")
    {
        std::vector<SettingSummary> s;
        for (index_t n : {200, 100})
            for (double h : {0.4, 0.8})
                for (const char* g : {"bic", "sc"}) s.push_back(summary(n, h, g, 0.5 + h / 2, 0.1, h / 3, 0.05 * n / 100));
        const auto csv = lines(emit_table(s, TableFormat::Csv));
        const auto md = emit_table(s, TableFormat::Markdown);
        CHECK(csv.size() == 5);
        CHECK(csv[1].rfind("I,1,100,0.4,", 0) == 0); // rows sorted by (n, h)
        for (size_t i = 1; i < csv.size(); ++i) {
            std::istringstream row(csv[i]);
            std::string cell;
            for (int k = 0; std::getline(row, cell, ','); ++k) {
                if (k >= 4) CHECK(md.find(" " + cell + " |") != std::string::npos);
            }
        }
        CHECK_THROWS_AS(emit_table({}, TableFormat::Csv), InvalidArgument);
    }

    TEST_CASE("sections split by structure and c")
    {
        auto a = summary(100, 0.8, "sc", 0.9, 0.1, 0.1, 0.1);
        auto b = a;
        b.setting.c = 2;
        const auto md = emit_table({a, b}, TableFormat::Markdown);
        CHECK(md.find("### Structure I, c = 1") != std::string::npos);
        CHECK(md.find("### Structure I, c = 2") != std::string::npos);
    }

    TEST_CASE("summary csv round-trips exactly")
    {
        RandomStream rng(17);
        std::vector<SettingSummary> s;
        for (int i = 0; i < 50; ++i) {
            auto x = summary(100 + i, rng.uniform(), i % 2 ? "sc" : "weird,\"label\"", rng.uniform(), rng.uniform(),
                             rng.uniform(), rng.uniform() * 1e-9);
            x.failures = i;
            x.flagged = i % 3 == 0;
            x.setting.structure = static_cast<CovarianceKind>(i % 3);
            s.push_back(x);
        }
        std::stringstream io;
        write_summary_csv(io, s);
        const auto back = read_summary_csv(io);
        REQUIRE(back.size() == s.size());
        for (size_t i = 0; i < s.size(); ++i) {
            CHECK(back[i].setting == s[i].setting);
            CHECK(back[i].gamma_label == s[i].gamma_label);
            CHECK(back[i].pdr_mean == s[i].pdr_mean);
            CHECK(back[i].pdr_sd == s[i].pdr_sd);
            CHECK(back[i].fdr_mean == s[i].fdr_mean);
            CHECK(back[i].fdr_sd == s[i].fdr_sd);
            CHECK(back[i].replicates_completed == s[i].replicates_completed);
            CHECK(back[i].failures == s[i].failures);
            CHECK(back[i].flagged == s[i].flagged);
        }
    }

    TEST_CASE("replicate log round-trips, including awkward statuses")
    {
        ReplicateRecord r;
        r.setting = {CovarianceKind::EigenBlock, 2, 500, 0.4};
        r.gamma_label = "sc";
        r.replicate = 17;
        r.pdr = 0.875;
        r.fdr = 1.0 / 7;
        r.selected_size = 7;
        r.lambda_star = 0.012345678901234567;
        r.status = "error: bad, \"quoted\" thing";
        std::stringstream io;
        write_replicate_csv(io, {r});
        const auto back = read_replicate_csv(io);
        REQUIRE(back.size() == 1);
        CHECK(back[0].setting == r.setting);
        CHECK(back[0].fdr == r.fdr);
        CHECK(back[0].lambda_star == r.lambda_star);
        CHECK(back[0].status == r.status);
        CHECK_FALSE(back[0].ok());
    }

    TEST_CASE("malformed csv is rejected")
    {
        std::stringstream bad_header("a,b\n");
        CHECK_THROWS_AS(read_summary_csv(bad_header), InvalidData);
        std::stringstream short_row(
            "structure,c,n,h,gamma_label,pdr_mean,pdr_sd,fdr_mean,fdr_sd,replicates_completed,failures,flagged\nI,1,100\n");
        CHECK_THROWS_AS(read_summary_csv(short_row), InvalidData);
        std::stringstream bad_number(
            "structure,c,n,h,gamma_label,pdr_mean,pdr_sd,fdr_mean,fdr_sd,replicates_completed,failures,flagged\n"
            "I,1,100,0.8,sc,abc,0,0,0,1,0,0\n");
        CHECK_THROWS_AS(read_summary_csv(bad_number), InvalidData);
    }
}
