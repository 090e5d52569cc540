# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled stepping kernel; semantics identical to haltlab._stepper_py.

See docs/machine-isa.md for the normative instruction set. Any divergence in
observable behavior between the two kernels is a bug (tests/test_kernel_parity
cross-checks them on random programs).
"""

RUNNING = 0
HALTED = 1
DIVERGED = 2
OUTPUT_LIMIT = 3

ACC_SATURATION = 2**63 - 1

cdef unsigned long long _SAT = 9223372036854775807ULL

cdef int _END = 0, _OUT0 = 1, _OUT1 = 2, _DBL = 3, _SPIN = 4
cdef int _TIMER = 5, _LOOP = 6, _ZEROS = 7, _INC = 8


def run_stream(
    bytes bits,
    Py_ssize_t start,
    Py_ssize_t total,
    bint prefix_free,
    bint allow_loops,
    unsigned long long budget,
    Py_ssize_t output_cap,
):
    """Execute the instruction stream bits[start:total]; see the pure twin."""
    cdef const unsigned char* buf = bits
    cdef Py_ssize_t pc = start
    cdef Py_ssize_t consumed = start
    cdef Py_ssize_t i, npc
    cdef unsigned long long steps = 0
    cdef unsigned long long acc = 0
    cdef int op, ones
    cdef bint truncated
    out = bytearray()
    while steps < budget:
        if pc >= total:
            if prefix_free:
                return (DIVERGED, steps, None)
            return (HALTED, steps + 1, b"")
        if buf[pc] == 0x31:
            op = _INC
            npc = pc + 1
        else:
            i = pc + 1
            ones = 0
            truncated = 0
            while ones < 7:
                if i >= total:
                    truncated = 1
                    break
                if buf[i] == 0x31:
                    ones += 1
                    i += 1
                else:
                    break
            if truncated:
                if prefix_free:
                    return (DIVERGED, steps, None)
                return (HALTED, steps + 1, b"")
            if ones == 7:
                op = _ZEROS
                npc = i
            else:
                op = ones
                npc = i + 1
        if op == _LOOP and not allow_loops:
            if prefix_free:
                return (DIVERGED, steps, None)
            return (HALTED, steps + 1, b"")
        if npc > consumed:
            consumed = npc
        steps += 1
        if op == _END:
            if prefix_free and consumed != total:
                return (DIVERGED, steps, None)
            return (HALTED, steps, bytes(out))
        elif op == _INC:
            if acc < _SAT:
                acc += 1
            pc = npc
        elif op == _OUT0:
            if len(out) + 1 > output_cap:
                return (OUTPUT_LIMIT, steps, None)
            out.append(0x30)
            pc = npc
        elif op == _OUT1:
            if len(out) + 1 > output_cap:
                return (OUTPUT_LIMIT, steps, None)
            out.append(0x31)
            pc = npc
        elif op == _DBL:
            # acc <= SAT < 2^63 so the shift cannot overflow unsigned 64-bit
            acc = acc << 1
            if acc > _SAT:
                acc = _SAT
            pc = npc
        elif op == _SPIN:
            if acc > 0:
                acc -= 1
            else:
                pc = npc
        elif op == _TIMER:
            acc = steps
            pc = npc
        elif op == _LOOP:
            if acc > 0:
                acc -= 1
                pc = start
            else:
                pc = npc
        else:
            if acc > <unsigned long long> (output_cap - len(out)):
                return (OUTPUT_LIMIT, steps, None)
            out.extend(b"0" * acc)
            pc = npc
    return (RUNNING, steps, None)
