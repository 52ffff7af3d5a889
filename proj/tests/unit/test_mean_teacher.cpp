// Copyright (c) 2026 The sen3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "sen/common/error.hpp"
#include "sen/mean_teacher/ema.hpp"

namespace sen::mt {
namespace {

model::ModelParams make(std::uint64_t seed) { return model::ModelParams(model::Arch::tiny(), seed); }

TEST(InitTeacher, DeepCopyMarkedNonTrainable) {
    model::ModelParams student = make(1);
    model::ModelParams teacher = init_teacher(student);
    EXPECT_FALSE(teacher.trainable());
    EXPECT_TRUE(teacher.same_layout(student));
    const double before = teacher.parameters()[0].value[0];
    student.parameters()[0].value.mutable_data()[0] += 1.0;
    EXPECT_EQ(teacher.parameters()[0].value[0], before);
}

TEST(Ema, GeometricLawWithConstantStudent) {
    const model::ModelParams student = make(2);
    model::ModelParams teacher = init_teacher(make(3));
    const double alpha = 0.9;
    EmaState state{alpha, 0, false};
    // Per-entry initial gaps |theta'_0 - theta|.
    std::vector<std::vector<double>> gap0;
    for (std::size_t i = 0; i < student.parameters().size(); ++i) {
        std::vector<double> g;
        for (std::size_t j = 0; j < student.parameters()[i].value.numel(); ++j)
            g.push_back(std::abs(teacher.parameters()[i].value[j] - student.parameters()[i].value[j]));
        gap0.push_back(std::move(g));
    }
    for (int t = 1; t <= 100; ++t) {
        ema_update(teacher, student, state);
        const double factor = std::pow(alpha, t);
        for (std::size_t i = 0; i < gap0.size(); ++i)
            for (std::size_t j = 0; j < gap0[i].size(); ++j) {
                const double gap = std::abs(teacher.parameters()[i].value[j] - student.parameters()[i].value[j]);
                ASSERT_NEAR(gap, factor * gap0[i][j], 1e-12) << "t=" << t;
            }
    }
    EXPECT_EQ(state.step, 100U);
}

TEST(Ema, ZeroMomentumCopiesStudentExactly) {
    const model::ModelParams student = make(4);
    model::ModelParams teacher = init_teacher(make(5));
    EmaState state{0.0, 0, false};
    ema_update(teacher, student, state);
    for (std::size_t i = 0; i < student.parameters().size(); ++i)
        for (std::size_t j = 0; j < student.parameters()[i].value.numel(); ++j)
            ASSERT_EQ(teacher.parameters()[i].value[j], student.parameters()[i].value[j]);
}

TEST(Ema, UpdateLeavesStudentUntouched) {
    const model::ModelParams student = make(6);
    const model::ModelParams copy = init_teacher(student);
    model::ModelParams teacher = init_teacher(make(7));
    EmaState state;
    ema_update(teacher, student, state);
    for (std::size_t i = 0; i < student.parameters().size(); ++i)
        for (std::size_t j = 0; j < student.parameters()[i].value.numel(); ++j)
            ASSERT_EQ(student.parameters()[i].value[j], copy.parameters()[i].value[j]);
}

TEST(Ema, WarmupRampsMomentum) {
    EmaState s{0.99, 0, true};
    EXPECT_DOUBLE_EQ(effective_momentum(s), 0.5);
    s.step = 3;
    EXPECT_DOUBLE_EQ(effective_momentum(s), 0.8);
    s.step = 1000;
    EXPECT_EQ(effective_momentum(s), 0.99);
    s.warmup = false;
    s.step = 0;
    EXPECT_EQ(effective_momentum(s), 0.99);
}

TEST(Ema, RejectsBadInput) {
    const model::ModelParams student = make(8);
    model::ModelParams teacher = init_teacher(student);
    EmaState bad{1.0, 0, false};
    EXPECT_THROW(ema_update(teacher, student, bad), InvalidArgument);
    model::ModelParams other(model::Arch::desk(Task::classification, 6), 1);
    EmaState ok;
    EXPECT_THROW(ema_update(other, student, ok), InvalidArgument);
}

}  // namespace
}  // namespace sen::mt
