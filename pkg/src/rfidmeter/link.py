"""Reader/writer side of the card link: frames carried over the ASK modem.

The link serializes a frame to bytes, keys the bits onto the carrier,
optionally adds channel noise, and demodulates/decodes on the far side.
Both directions share one AskConfig. A CardReader binds a link to a card
and its session so callers can run request/response transactions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .card import CardImage, CardSession, card_transact
from .frames import Frame, FrameCommand, decode_frame, encode_frame
from .modem import AskConfig, bits_to_bytes, bytes_to_bits, demodulate, modulate


@dataclass
class AskLink:
    """One simulated air interface with optional additive uniform noise."""

    config: AskConfig = field(default_factory=AskConfig)
    noise_amplitude: float = 0.0
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    def carry(self, data: bytes) -> bytes:
        """Run raw bytes through modulate -> channel -> demodulate."""
        samples = modulate(bytes_to_bits(data), self.config)
        if self.noise_amplitude > 0.0:
            samples = samples + self.rng.uniform(
                -self.noise_amplitude, self.noise_amplitude, samples.size
            )
        return bits_to_bytes(demodulate(samples, self.config))


@dataclass
class CardReader:
    """A reader/writer with one card in its field."""

    card: CardImage
    link: AskLink = field(default_factory=AskLink)
    session: CardSession = field(default_factory=CardSession)

    def transact(self, cmd: FrameCommand, payload: bytes = b"") -> Frame:
        """Send one request frame over the air and return the decoded response."""
        request_bytes = self.link.carry(encode_frame(cmd, payload))
        request = decode_frame(request_bytes)
        response = card_transact(self.card, request, self.session)
        response_bytes = self.link.carry(encode_frame(response.cmd, response.payload))
        return decode_frame(response_bytes)

    def reset_session(self) -> None:
        self.session = CardSession()
