"""Walk one credit card transaction across the emulated air gap.

Shows the byte layout of each protocol frame, the amplitude-keyed
waveform it rides on, and what the card answers at every step.

Run from the repo root:  python3 demos/01_card_link_roundtrip.py
"""

import numpy as np

from rfidmeter.card import CardImage
from rfidmeter.frames import FrameCommand, encode_frame, pack_balance, unpack_balance
from rfidmeter.link import AskLink, CardReader
from rfidmeter.modem import AskConfig, bytes_to_bits, modulate

UID = bytes.fromhex("a1b2c3d4")
KEY = bytes.fromhex("0011223344556677")


def hexdump(label: str, blob: bytes) -> None:
    print(f"  {label:<22} {blob.hex(' ')}")


def main() -> None:
    card = CardImage(UID, KEY, balance_msen=500_000)

    print("== the wire format ==")
    wire = encode_frame(FrameCommand.READ_BAL, UID)
    hexdump("READ_BAL request", wire)
    print("  start 0xaa | cmd | len | payload | crc16 | end 0x55")

    print("\n== the waveform ==")
    config = AskConfig()  # 125 kHz carrier, 2 kbit/s, full modulation depth
    samples = modulate(bytes_to_bits(wire), config)
    bits = len(wire) * 8
    print(f"  {len(wire)} bytes -> {bits} bits -> {len(samples)} samples "
          f"at {config.sample_rate_hz} Hz")
    print(f"  peak amplitude {np.max(np.abs(samples)):.3f}, "
          f"{config.samples_per_bit} samples per bit")

    print("\n== a full session over a noisy link ==")
    link = AskLink(config, noise_amplitude=0.15)
    reader = CardReader(card, link)

    reply = reader.transact(FrameCommand.AUTH, UID + KEY)
    print(f"  AUTH        -> {reply.cmd.name}")

    reply = reader.transact(FrameCommand.READ_BAL, UID)
    print(f"  READ_BAL    -> {reply.cmd.name}, balance {unpack_balance(reply.payload)} msen")

    reply = reader.transact(FrameCommand.WRITE_BAL, pack_balance(750_000))
    print(f"  WRITE_BAL   -> {reply.cmd.name}, card now holds {card.balance_msen} msen")

    print("\n== wrong key gets nowhere ==")
    reader.reset_session()
    reply = reader.transact(FrameCommand.AUTH, UID + bytes(8))
    print(f"  AUTH (bad)  -> {reply.cmd.name}, reason 0x{reply.payload[0]:02x}")
    reply = reader.transact(FrameCommand.WRITE_BAL, pack_balance(0))
    print(f"  WRITE_BAL   -> {reply.cmd.name} (locked), balance still {card.balance_msen} msen")


if __name__ == "__main__":
    main()
