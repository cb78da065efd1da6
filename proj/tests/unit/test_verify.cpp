/*
   Copyright 2026 The conelab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <doctest.h>

#include "conelab/error.hpp"
#include "conelab/parallel.hpp"
#include "conelab/verify.hpp"

using namespace conelab;

TEST_SUITE("verify")
{
    TEST_CASE("every suite runs at small trial counts")
    {
        for (const auto& name : lemma_names())
        {
            VerifyOptions opt;
            opt.trials = name == "cone-nullslab" || name == "curvature" ? 5 : 200;
            const VerifySummary s = run_verify(name, opt);
            CAPTURE(name);
            CHECK(s.lemma == name);
            CHECK(s.trials == opt.trials);
            const nlohmann::json j = to_json(s);
            CHECK(j.at("lemma") == name);
            CHECK(j.contains(s.metric));
            CHECK(j.contains("pass"));
        }
        CHECK(lemma_names().size() == 9);
    }

    TEST_CASE("suites that must pass at default settings")
    {
        for (const char* name : {"overlap", "strip-circle", "gradient-flow", "curvature", "whitney"})
        {
            VerifyOptions opt;
            opt.trials = std::string(name) == "curvature" ? 10 : 2000;
            CAPTURE(name);
            CHECK(run_verify(name, opt).pass);
        }
    }

    TEST_CASE("results do not depend on the thread count")
    {
        VerifyOptions opt;
        opt.trials = 5000;
        const int before = thread_count();
        set_thread_count(1);
        const VerifySummary a = run_verify("angle-lemma", opt);
        set_thread_count(4);
        const VerifySummary b = run_verify("angle-lemma", opt);
        set_thread_count(before);
        CHECK(a.value == b.value);
        CHECK(to_json(a).dump() == to_json(b).dump());
    }

    TEST_CASE("bad arguments")
    {
        CHECK_THROWS_AS(run_verify("nope"), ParseError);
        VerifyOptions opt;
        opt.tol = 0;
        CHECK_THROWS_AS(run_verify("circle-intersection", opt), DomainError);
    }

    TEST_CASE("tolerance is honoured")
    {
        VerifyOptions opt;
        opt.trials = 200;
        opt.tol = 1e-6;
        CHECK_FALSE(run_verify("circle-intersection", opt).pass);
        opt.tol = 100;
        CHECK(run_verify("circle-intersection", opt).pass);
    }
}
