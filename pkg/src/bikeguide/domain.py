"""Fluent and action vocabulary of the bike-collection domain.

Every module that reads or builds ground actions goes through these
helpers, so the naming convention lives in exactly one place:

    at(L)          agent stands at landmark L
    bike-at(b,L)   bike b is at L
    holding(b)     bike b collected
    unfound(b)     b's position not yet committed (determinization only)
    visited(L), delivered(b)  bookkeeping fluents (no action touches them)

    move(src,dst)  walk one road edge
    pickup(b,L)    collect b at L
    find(b,L)      determinization: commit to candidate L for b
"""

from __future__ import annotations

from .planning.model import Fluent, GroundAction, fl

MOVE = "move"
PICKUP = "pickup"
FIND = "find"

AT = "at"
BIKE_AT = "bike-at"
HOLDING = "holding"
UNFOUND = "unfound"


def at(landmark: str) -> Fluent:
    return fl("at", landmark)


def bike_at(bike: str, landmark: str) -> Fluent:
    return fl("bike-at", bike, landmark)


def holding(bike: str) -> Fluent:
    return fl("holding", bike)


def unfound(bike: str) -> Fluent:
    return fl("unfound", bike)


def visited(landmark: str) -> Fluent:
    return fl("visited", landmark)


def delivered(bike: str) -> Fluent:
    return fl("delivered", bike)


def is_move(action: GroundAction) -> bool:
    return action.name == MOVE


def is_pickup(action: GroundAction) -> bool:
    return action.name == PICKUP


def is_find(action: GroundAction) -> bool:
    return action.name == FIND


def move_src(action: GroundAction) -> str:
    return action.params[0]


def move_dst(action: GroundAction) -> str:
    return action.params[1]


def pickup_bike(action: GroundAction) -> str:
    return action.params[0]


def pickup_location(action: GroundAction) -> str:
    return action.params[1]


def find_bike(action: GroundAction) -> str:
    return action.params[0]


def find_location(action: GroundAction) -> str:
    return action.params[1]
