% Zeno travel: one plane, three passengers, four cities.
% Times in minutes, distances in miles, fuel in gallons.

sort person = {scott, ernie, dan}.
sort place = {a, b, c, d}.
sort location = place + {enroute}.
sort thing = person + {plane}.
sort speed = {400, 600}.

var P : person.
var L, L1, L2 : place.
var S : speed.

fluent boarding(person, place) : bool.
fluent deplaning(person, place) : bool.
fluent on_board(person) : bool.
fluent refueling : bool.
fluent flying(place, place, speed) : bool.
fluent location(thing) : location.
process time_left_board(person, place) : [0, 30] via tb_initial, tb_time, tb_final.
process time_left_deplane(person, place) : [0, 20] via td_initial, td_time, td_final.
process distance_left(place, place) : [0, 1000] via d_initial, d_time, d_final.
process fuel_level : [0, 750] via f_initial, f_time, f_final.

action start_boarding(person, place) : agent.
action end_boarding(person, place) : exogenous.
action start_deplaning(person, place) : agent.
action end_deplaning(person, place) : exogenous.
action start_refueling : agent.
action end_refueling : exogenous.
action start_flying(place, place, speed) : agent.
action end_flying(place, place) : exogenous.

fact distance(a, b, 600).
fact distance(a, c, 1000).
fact distance(b, c, 800).
fact distance(c, d, 1000).
% gallons per mile at each speed
fact fc(400, 3).
fact fc(600, 2).

location(P) = L if location(plane) = L, on_board(P).

% boarding
start_boarding(P, L) causes boarding(P, L).
start_boarding(P, L) causes time_left_board(P, L) = max(0, 30 - (T - T0)) if end = T0.
impossible start_boarding(P, L) if boarding(P, L).
impossible start_boarding(P, L) if on_board(P).
impossible start_boarding(P, L) if location(P) != L.
impossible start_boarding(P, L) if location(plane) != L.
time_left_board(P, L)(end) = 0, boarding(P, L) triggers end_boarding(P, L).
end_boarding(P, L) causes -boarding(P, L).
end_boarding(P, L) causes on_board(P).
end_boarding(P, L) causes time_left_board(P, L) = 0.
impossible end_boarding(P, L) if -boarding(P, L).

% deplaning
start_deplaning(P, L) causes deplaning(P, L).
start_deplaning(P, L) causes time_left_deplane(P, L) = max(0, 20 - (T - T0)) if end = T0.
impossible start_deplaning(P, L) if deplaning(P, L).
impossible start_deplaning(P, L) if -on_board(P).
impossible start_deplaning(P, L) if location(plane) != L.
time_left_deplane(P, L)(end) = 0, deplaning(P, L) triggers end_deplaning(P, L).
end_deplaning(P, L) causes -deplaning(P, L).
end_deplaning(P, L) causes -on_board(P).
end_deplaning(P, L) causes time_left_deplane(P, L) = 0.
impossible end_deplaning(P, L) if -deplaning(P, L).

% refueling at 20 gallons per minute up to a full tank. An hour from empty to
% full would be 12.5 gal/min, but the timed plan only works out at 20.
start_refueling causes refueling.
start_refueling causes fuel_level = max(750, X + 20 * (T - T0)) if fuel_level(end) = X, end = T0.
impossible start_refueling if refueling.
impossible start_refueling if location(plane) = enroute.
fuel_level(end) = 750, refueling triggers end_refueling.
end_refueling causes -refueling.
end_refueling causes fuel_level = X if fuel_level(end) = X.
impossible end_refueling if location(plane) = enroute.
impossible end_refueling if -refueling.

% flying
start_flying(L1, L2, S) causes location(plane) = enroute.
start_flying(L1, L2, S) causes flying(L1, L2, S).
start_flying(L1, L2, S) causes distance_left(L1, L2) = max(0, X - S * (T - T0) / 60) if distance(L1, L2, X), end = T0.
start_flying(L1, L2, S) causes fuel_level = max(0, X - S * (T - T0) / (60 * fc(S))) if fuel_level(end) = X, end = T0.
impossible start_flying(L1, L2, S) if -distance(L1, L2, Y).
impossible start_flying(L1, L2, S) if location(plane) = enroute.
impossible start_flying(L1, L2, S) if location(plane) != L1.
impossible start_flying(L1, L2, S) if boarding(P, L1), location(P) = L1.
impossible start_flying(L1, L2, S) if deplaning(P, L1).
impossible start_flying(L1, L2, S) if refueling.
impossible start_flying(L1, L2, S) if fuel_level(end) = X, distance(L1, L2, Y), X < Y / fc(S).
distance_left(L1, L2)(end) = 0, flying(L1, L2, S) triggers end_flying(L1, L2).
end_flying(L1, L2) causes location(plane) = L2.
end_flying(L1, L2) causes -flying(L1, L2, S).
end_flying(L1, L2) causes distance_left(L1, L2) = 0.
end_flying(L1, L2) causes fuel_level = X if fuel_level(end) = X.
impossible end_flying(L1, L2) if location(plane) != enroute.
