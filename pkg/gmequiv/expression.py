'''
Kernel expression language.

Custom kernels are written as arithmetic expressions in the single variable
``t``. The grammar is kept in :data:`GRAMMAR` (EBNF) and printed with
every usage error.

Parsing is a Pratt (top-down operator precedence) parser; evaluation is
vectorised over numpy arrays and raises :class:`EvaluationError` on any
floating point domain error instead of returning nan or inf.
'''

import re
import logging
from dataclasses import dataclass

import numpy as np

from gmequiv.exceptions import ExpressionSyntaxError, UnknownIdentifier, EvaluationError

log = logging.getLogger(__name__)

GRAMMAR = '''\
expression = term , { ( "+" | "-" ) , term } ;
term       = unary , { ( "*" | "/" ) , unary } ;
unary      = "-" , unary | power ;
power      = atom , [ "^" , unary ] ;
atom       = number | "t" | function , "(" , expression , ")"
           | "(" , expression , ")" ;
function   = "exp" | "sin" | "cos" | "sqrt" | "log" ;
number     = digits , [ "." , [ digits ] ] , [ exponent ]
           | "." , digits , [ exponent ] ;
exponent   = ( "e" | "E" ) , [ "+" | "-" ] , digits ;
'''

VARIABLE = 't'

FUNCTIONS = {
    'exp': np.exp,
    'sin': np.sin,
    'cos': np.cos,
    'sqrt': np.sqrt,
    'log': np.log,
}

# binding powers
ADD = 10
MUL = 20
NEG = 25
POW = 30
ATOM = 100

BINARY_POWER = {'+': ADD, '-': ADD, '*': MUL, '/': MUL, '^': POW}


@dataclass(frozen=True)
class Number:
    value: float

@dataclass(frozen=True)
class Variable:
    name: str

@dataclass(frozen=True)
class Call:
    func: str
    arg: object

@dataclass(frozen=True)
class Neg:
    operand: object

@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


def number(value):
    '''
    Literal node for any finite real, wrapping negative values in Neg
    since the language has no negative literals.
    '''
    value = float(value)
    if value < 0:
        return Neg(Number(-value))
    return Number(value)


_TOKEN_RE = re.compile(r'''
    (?P<space>\s+)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
  | (?P<bad>.)
''', re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def _byte_offset(source, index):
    return len(source[:index].encode('utf-8'))

def tokenize(source):
    tokens = []
    for match in _TOKEN_RE.finditer(source):
        kind = match.lastgroup
        if kind == 'space':
            continue
        offset = _byte_offset(source, match.start())
        if kind == 'bad':
            raise ExpressionSyntaxError(
                'Unexpected character "%s"' % match.group(), offset,
                'number, "t", function or operator')
        tokens.append(Token(kind, match.group(), offset))
    tokens.append(Token('end', '', len(source.encode('utf-8'))))
    return tokens


class _Parser(object):

    def __init__(self, source):
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def token(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.token
        self.pos += 1
        return token

    def expect(self, text):
        token = self.token
        if token.text != text or token.kind != 'op':
            raise ExpressionSyntaxError(
                'Unexpected %s' % _describe(token), token.offset, '"%s"' % text)
        return self.advance()

    def parse(self):
        tree = self.expression(0)
        if self.token.kind != 'end':
            raise ExpressionSyntaxError(
                'Unexpected %s' % _describe(self.token), self.token.offset,
                'operator or end of input')
        return tree

    def expression(self, rbp):
        left = self.nud(self.advance())
        while rbp < self.lbp(self.token):
            left = self.led(self.advance(), left)
        return left

    def lbp(self, token):
        if token.kind == 'op':
            return BINARY_POWER.get(token.text, 0)
        return 0

    def nud(self, token):
        if token.kind == 'number':
            return Number(float(token.text))

        if token.kind == 'name':
            if token.text == VARIABLE:
                return Variable(VARIABLE)
            if token.text in FUNCTIONS:
                self.expect('(')
                arg = self.expression(0)
                self.expect(')')
                return Call(token.text, arg)
            raise UnknownIdentifier(token.text, token.offset)

        if token.kind == 'op' and token.text == '-':
            return Neg(self.expression(NEG))

        if token.kind == 'op' and token.text == '(':
            inner = self.expression(0)
            self.expect(')')
            return inner

        raise ExpressionSyntaxError(
            'Unexpected %s' % _describe(token), token.offset, 'expression')

    def led(self, token, left):
        if token.text == '^':
            # right associative, and the exponent may carry a unary minus
            return BinOp('^', left, self.expression(NEG - 1))
        return BinOp(token.text, left, self.expression(BINARY_POWER[token.text]))

def _describe(token):
    if token.kind == 'end':
        return 'end of input'
    return '"%s"' % token.text


def parse(source):
    if isinstance(source, bytes):
        source = source.decode('utf-8')
    return _Parser(source).parse()


def _precedence(node):
    if isinstance(node, BinOp):
        return BINARY_POWER[node.op]
    if isinstance(node, Neg):
        return NEG
    return ATOM

def _wrap(node, parens):
    s = to_string(node)
    if parens:
        return '(%s)' % s
    return s

def to_string(node):
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, Variable):
        return node.name
    if isinstance(node, Call):
        return '%s(%s)' % (node.func, to_string(node.arg))
    if isinstance(node, Neg):
        return '-' + _wrap(node.operand, _precedence(node.operand) < NEG)

    prec = BINARY_POWER[node.op]
    if node.op == '^':
        left = _wrap(node.left, _precedence(node.left) <= POW)
        right = _wrap(node.right, _precedence(node.right) < POW)
        return '%s^%s' % (left, right)
    left = _wrap(node.left, _precedence(node.left) < prec)
    right = _wrap(node.right, _precedence(node.right) <= prec)
    return '%s %s %s' % (left, node.op, right)


def _evaluate(node, t):
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Variable):
        return t
    if isinstance(node, Call):
        return FUNCTIONS[node.func](_evaluate(node.arg, t))
    if isinstance(node, Neg):
        return -_evaluate(node.operand, t)

    left = _evaluate(node.left, t)
    right = _evaluate(node.right, t)
    if node.op == '+':
        return left + right
    if node.op == '-':
        return left - right
    if node.op == '*':
        return left * right
    if node.op == '/':
        return np.true_divide(left, right)
    return np.power(left, right)

def evaluate(node, t):
    t = np.asarray(t, dtype=float)
    try:
        with np.errstate(divide='raise', over='raise', invalid='raise', under='ignore'):
            value = _evaluate(node, t)
    except (FloatingPointError, ZeroDivisionError) as e:
        raise EvaluationError('Cannot evaluate %s: %s' % (to_string(node), e))

    value = np.asarray(value, dtype=float) + np.zeros_like(t)
    if not np.all(np.isfinite(value)):
        raise EvaluationError('Cannot evaluate %s: non-finite result' % to_string(node))
    if value.ndim == 0:
        return float(value)
    return value


class KernelExpression(object):
    '''
    A parsed expression in ``t``. Instances are immutable and compare by
    syntax tree.
    '''

    def __init__(self, ast, source=None):
        self.ast = ast
        self.source = source if source is not None else to_string(ast)

    @classmethod
    def parse(cls, source):
        return cls(parse(source), source)

    def __call__(self, t):
        return evaluate(self.ast, t)

    def __eq__(self, other):
        return isinstance(other, KernelExpression) and self.ast == other.ast

    def __hash__(self):
        return hash(self.ast)

    def __str__(self):
        return to_string(self.ast)

    def __repr__(self):
        return 'KernelExpression(%r)' % str(self)

    def __sub__(self, other):
        return KernelExpression(BinOp('-', self.ast, other.ast))

    def __mul__(self, other):
        return KernelExpression(BinOp('*', self.ast, other.ast))

    @classmethod
    def constant(cls, value):
        return cls(number(value))


def parse_kernel_expression(source):
    return KernelExpression.parse(source)
