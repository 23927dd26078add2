import argparse


class ProbeBenchArgumentParser(argparse.ArgumentParser):
    """
    An argument parser that lists required and optional arguments in separate help sections and refuses abbreviated
    long options.

    Argparse lists every flag under "optional arguments" even when it is required; the bench subcommands have several
    required flags (--scheme, --n, --log2-inv-delta) so the split keeps the help text honest.
    """
    def __init__(self, *args, **kwargs):
        # help is added by hand so that it lands in the optional group
        should_add_help = kwargs.pop('add_help', True)
        super().__init__(*args, add_help=False, **kwargs)

        self._required_arg_group = self.add_argument_group('required arguments')
        self._optional_arg_group = self.add_argument_group('optional arguments')
        if should_add_help:
            self._optional_arg_group.add_argument('-h', '--help', help='show this help message and exit', action='help')

    def add_argument(self, *args, **kwargs):
        is_required = kwargs.get('required', False)
        target_arg_group = self._required_arg_group if is_required else self._optional_arg_group
        return target_arg_group.add_argument(*args, **kwargs)

    def _get_option_tuples(self, option_string):
        """
        Disable prefix matching for long options. Otherwise "--n" would silently resolve to any future flag that
        starts with "--n", and "--log2" to "--log2-inv-delta".
        """
        chars = self.prefix_chars
        if option_string[0] in chars and option_string[1] in chars:
            return []

        return super()._get_option_tuples(option_string)


class ProbeBenchHelpFormatter(argparse.HelpFormatter):
    def _get_help_string(self, action):
        """
        Append the default value to the help of optional flags that have one.
        """
        help_string = action.help
        if not action.required and action.default not in (argparse.SUPPRESS, None, False):
            if action.option_strings or action.nargs in (argparse.OPTIONAL, argparse.ZERO_OR_MORE):
                # argparse expands %-style placeholders itself
                help_string += ' (default: %(default)s)'
        return help_string

    def _format_action_invocation(self, action):
        """
        Render "--log2-inv-delta <LOG2_INV_DELTA>" instead of argparse's "--log2-inv-delta LOG2_INV_DELTA", and join
        aliases with a slash: "-v/--verbose".
        """
        if not action.option_strings:
            return super()._format_action_invocation(action)

        invocation = '/'.join(action.option_strings)
        if action.nargs != 0:
            metavar = self._format_args(action, self._get_default_metavar_for_optional(action))
            invocation = '{} {}'.format(invocation, metavar)
        return invocation

    def _get_default_metavar_for_optional(self, action):
        return '<{}>'.format(action.dest.upper())
