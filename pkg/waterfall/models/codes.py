"""
Transmission scheme descriptions
Uncoded BPSK, a recursive systematic convolutional (RSC) code, or a
parallel-concatenated turbo code built from two identical RSC encoders.
"""

from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def octal_to_int(octal: int) -> int:
    """Read the decimal digits of `octal` as an octal number (17 -> 15)"""
    return int(str(octal), 8)


class ConvCodeSpec(BaseModel):
    """Rate-1/2 RSC code (1, feedforward/feedback), MSB of each generator is the D^0 tap"""

    model_config = ConfigDict(frozen=True)

    feedforward_octal: int = 17
    feedback_octal: int = 15
    memory: int = Field(default=3, ge=1, le=8)
    terminated: bool = True

    @field_validator("feedforward_octal", "feedback_octal")
    @classmethod
    def octal_digits(cls, v: int) -> int:
        if v <= 0 or any(ch not in "01234567" for ch in str(v)):
            raise ValueError(f"{v} is not a positive octal generator")
        return v

    @model_validator(mode="after")
    def generators_fit_memory(self) -> "ConvCodeSpec":
        limit = 1 << (self.memory + 1)
        if self.feedforward >= limit or self.feedback >= limit:
            raise ValueError(
                f"generators {self.feedforward_octal}/{self.feedback_octal} "
                f"do not fit in memory {self.memory}"
            )
        if not (self.feedback >> self.memory) & 1:
            raise ValueError("leading coefficient of the feedback polynomial must be 1")
        return self

    @property
    def feedforward(self) -> int:
        return octal_to_int(self.feedforward_octal)

    @property
    def feedback(self) -> int:
        return octal_to_int(self.feedback_octal)

    @property
    def num_states(self) -> int:
        return 1 << self.memory

    def label(self) -> str:
        return f"(1,{self.feedforward_octal}/{self.feedback_octal})"


DEFAULT_RSC = ConvCodeSpec(feedforward_octal=17, feedback_octal=15, memory=3, terminated=True)
DEFAULT_TURBO_CONSTITUENT = ConvCodeSpec(feedforward_octal=5, feedback_octal=7, memory=2, terminated=True)


class TurboCodeSpec(BaseModel):
    """Rate-1/3 turbo code; encoder 1 is terminated, encoder 2 is left open"""

    model_config = ConfigDict(frozen=True)

    constituent: ConvCodeSpec = DEFAULT_TURBO_CONSTITUENT
    interleaver: Tuple[int, ...]
    iterations: int = Field(default=8, ge=1)
    interleaver_seed: Optional[int] = None

    @field_validator("interleaver")
    @classmethod
    def is_permutation(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(v) == 0 or sorted(v) != list(range(len(v))):
            raise ValueError("interleaver must be a permutation of 0..L-1")
        return v

    def label(self) -> str:
        c = self.constituent
        return f"(1,{c.feedforward_octal}/{c.feedback_octal},{c.feedforward_octal}/{c.feedback_octal})"


class SchemeSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["uncoded", "convolutional", "turbo"]
    frame_length: int = Field(ge=1)
    code: Optional[ConvCodeSpec] = None
    turbo: Optional[TurboCodeSpec] = None

    @model_validator(mode="after")
    def parameters_match_kind(self) -> "SchemeSpec":
        if self.kind == "convolutional" and self.code is None:
            raise ValueError("convolutional scheme needs a code specification")
        if self.kind == "turbo":
            if self.turbo is None:
                raise ValueError("turbo scheme needs a turbo specification")
            if len(self.turbo.interleaver) != self.frame_length:
                raise ValueError(
                    f"interleaver length {len(self.turbo.interleaver)} "
                    f"!= frame length {self.frame_length}"
                )
        return self

    @classmethod
    def uncoded(cls, frame_length: int) -> "SchemeSpec":
        return cls(kind="uncoded", frame_length=frame_length)

    @classmethod
    def convolutional(cls, frame_length: int, code: ConvCodeSpec = DEFAULT_RSC) -> "SchemeSpec":
        return cls(kind="convolutional", frame_length=frame_length, code=code)

    @classmethod
    def turbo_code(
        cls,
        frame_length: int,
        interleaver_seed: int = 1,
        iterations: int = 8,
        constituent: ConvCodeSpec = DEFAULT_TURBO_CONSTITUENT,
    ) -> "SchemeSpec":
        from waterfall.services.turbo import make_interleaver

        turbo = TurboCodeSpec(
            constituent=constituent,
            interleaver=tuple(make_interleaver(frame_length, interleaver_seed)),
            iterations=iterations,
            interleaver_seed=interleaver_seed,
        )
        return cls(kind="turbo", frame_length=frame_length, turbo=turbo)

    def with_frame_length(self, frame_length: int) -> "SchemeSpec":
        """Same scheme at another frame length (turbo keeps its interleaver seed)"""
        if self.kind == "uncoded":
            return SchemeSpec.uncoded(frame_length)
        if self.kind == "convolutional":
            return SchemeSpec.convolutional(frame_length, self.code)
        seed = self.turbo.interleaver_seed if self.turbo.interleaver_seed is not None else 1
        return SchemeSpec.turbo_code(
            frame_length, seed, self.turbo.iterations, self.turbo.constituent
        )

    @property
    def codeword_length(self) -> int:
        L = self.frame_length
        if self.kind == "uncoded":
            return L
        if self.kind == "convolutional":
            return 2 * (L + (self.code.memory if self.code.terminated else 0))
        return 3 * L + 2 * self.turbo.constituent.memory

    def describe(self) -> str:
        if self.kind == "uncoded":
            return f"uncoded BPSK, L={self.frame_length}"
        if self.kind == "convolutional":
            return f"RSC {self.code.label()}, L={self.frame_length}"
        return (
            f"turbo {self.turbo.label()}, L={self.frame_length}, "
            f"{self.turbo.iterations} iterations"
        )
