% A brick dropped from 200 m falls freely (g = 9.8) until it hits the ground.

sort brick = {b}.
var B : brick.

fluent held(brick) : bool.
process height(brick) : [0, 200].

action drop(brick) : agent.
action hit_ground(brick) : exogenous.

drop(B) causes height(B) = 200 - 4.9 * (T - T0) ^ 2 if end = T0.
drop(B) causes -held(B).
impossible drop(B) if -held(B).
height(B)(end) = 0, -held(B) triggers hit_ground(B).
hit_ground(B) causes height(B) = 0.
